"""End-to-end acceptance checks, one test per criterion.

A summary line per criterion is printed at the end of the pytest run.
Criteria 6 and 7 are seed-pinned Monte Carlo runs and take a few minutes.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import hermite_e
from scipy import stats

from hermite_lab.bounds import (
    PRINTED_C4,
    PRINTED_C6,
    exact_constant_cd,
    jensen_summand,
    lower_constant,
    lower_rate,
    min_Nd,
    printed_constant_expression,
    small_d_prefactor,
    upper_constant,
)
from hermite_lab.cli import main
from hermite_lab.fitting import RankDeficientError, eval_model, fit_power_exponential
from hermite_lab.hermite import (
    ExactPolynomial,
    fourth_moment_expanded,
    fourth_moment_linearized,
    gaussian_expectation,
    hermite_coeffs,
    hermite_fourth_moment,
    poly_mul,
)
from hermite_lab.montecarlo import (
    ExperimentConfig,
    default_threads,
    dkw_band,
    ks_distance,
    run_experiment,
    simulate_hermite_vectors,
    simulate_snd_replicates,
)
from hermite_lab.rng import RandomStream
from hermite_lab.special import chi2_sf
from hermite_lab.statistics import (
    MOMENT_POLYNOMIALS,
    hm4_delta,
    hm4_sigma_symbolic,
    moment_variance,
    sigma_discrepancy,
)

SEED = 42
H = hermite_coeffs


def test_exact_algebra(criterion):
    criterion(1)
    t0 = time.perf_counter()
    for p in range(13):
        for q in range(13):
            assert gaussian_expectation(poly_mul(H(p), H(q))) == (math.factorial(q) if p == q else 0)
    for q in range(1, 13):
        assert H(q).derivative() == H(q - 1) * q
        assert gaussian_expectation(H(q)) == 0
    x = ExactPolynomial((0, 1))
    assert x**3 == H(3) + H(1) * 3 == MOMENT_POLYNOMIALS[3]
    assert x**4 - 3 == H(4) + H(2) * 6 == MOMENT_POLYNOMIALS[4]
    assert x**5 - x**3 * 10 == H(5) - H(1) * 15 == MOMENT_POLYNOMIALS[5]
    assert x**6 - x**4 * 15 + 30 == H(6) - H(2) * 45 == MOMENT_POLYNOMIALS[6]
    assert [moment_variance(k) for k in (3, 4, 5, 6)] == [15, 96, 345, 4770]
    elapsed = time.perf_counter() - t0
    assert elapsed < 5
    criterion(1, "orthogonality p,q<=12, derivative/zero-mean, 4 expansions, normalizers 15/96/345/4770")


def test_fourth_moment_oracle(criterion):
    criterion(2)
    t0 = time.perf_counter()
    for q in range(13):
        assert fourth_moment_expanded(q) == fourth_moment_linearized(q)
    golden = [3, 60, 3348, 368064, 67003200, 18231609600]
    values = [hermite_fourth_moment(q) for q in range(1, 7)]
    # independent third route: Gauss-HermiteE quadrature, exact for degree <= 79
    nodes, weights = hermite_e.hermegauss(40)
    for q, g in zip(range(1, 7), golden):
        h4 = np.polynomial.polynomial.polypow([float(c) for c in H(q).coeffs], 4)
        quad = np.dot(weights, np.polynomial.polynomial.polyval(nodes, h4)) / math.sqrt(2 * math.pi)
        assert quad == pytest.approx(g, rel=1e-10)
    assert values == golden
    assert time.perf_counter() - t0 < 5
    criterion(2, f"routes agree q<=12; E[H_q^4], q=1..6 = {values}")


def test_constants(criterion):
    criterion(3)
    t0 = time.perf_counter()
    r = 2**1.5
    assert float(upper_constant()) == pytest.approx(58 * r / (r - 1), rel=1e-9)
    assert float(lower_constant()) == pytest.approx((8 * math.e * math.pi**3) ** -0.25 / r, rel=1e-6)
    assert min_Nd(8)[1] == 3570
    assert float(lower_rate(4).exact_rate) == pytest.approx(36 / math.sqrt(24), rel=1e-12)
    for d in range(2, 41, 2):
        cert = lower_rate(d)
        assert cert.exact_rate >= cert.stirling_floor
        h = d // 2
        lhs = cert.squared_rate_rational * math.factorial(h - 1) ** 2 * math.factorial(h) ** 4
        assert lhs == math.factorial(d) * math.factorial(d - 1) ** 2
    assert time.perf_counter() - t0 < 1
    criterion(
        3,
        f"C={float(upper_constant()):.10g} c={float(lower_constant()):.10g} "
        f"min_Nd(8)={float(min_Nd(8)[0]):.6g} (ceil 3570)",
    )


def test_printed_constant_adjudication(criterion):
    criterion(4)
    t0 = time.perf_counter()
    printed6 = float(printed_constant_expression(6))
    assert printed6 == pytest.approx(PRINTED_C6, rel=1e-4)
    oracle6 = float(exact_constant_cd(6))
    assert 0.97 < oracle6 / printed6 < 0.99
    # C_4: only the oracle's self-consistency is asserted; the printed numbers are reported
    oracle4 = exact_constant_cd(4)
    ratios = (3, 15, 93, 639)
    for i, ratio in zip(range(1, 5), ratios):
        assert Fraction(hermite_fourth_moment(i), math.factorial(i) ** 2) == ratio
    manual = float(small_d_prefactor(4)) * sum(v**0.75 for v in ratios)
    assert float(oracle4) == pytest.approx(manual, rel=1e-12)
    assert float(oracle4) == pytest.approx(
        float(small_d_prefactor(4)) * sum(float(jensen_summand(i)) for i in range(1, 5)), rel=1e-14
    )
    printed4 = float(printed_constant_expression(4))
    assert time.perf_counter() - t0 < 1
    criterion(
        4,
        f"C_6 printed-expr={printed6:.10g} vs printed {PRINTED_C6} | oracle={oracle6:.10g} "
        f"({100 * (oracle6 / printed6 - 1):+.2f}%); C_4 printed={PRINTED_C4} printed-expr={printed4:.10g} "
        f"oracle={float(oracle4):.10g} (three-way discrepancy)",
    )


def test_sigma_adjudication(criterion):
    criterion(5)
    t0 = time.perf_counter()
    D = hm4_delta().to_mpmath()
    gram = D * D.T
    sigma = hm4_sigma_symbolic()
    S = sigma.to_mpmath()
    for i in range(4):
        for j in range(4):
            assert abs(gram[i, j] - S[i, j]) < 1e-12
    Sn = sigma.to_numpy()
    assert Sn[0, 2] == pytest.approx(-3 * math.sqrt(23) / 23, rel=1e-15)
    assert np.all(np.diag(Sn) == 1.0)

    # per-observation HM4 features from 200,000 draws; covariance vs symbolic Sigma
    m = 200_000
    x = RandomStream(SEED, 5).normals(m)
    feats = np.stack(
        [
            x**3 / math.sqrt(15),
            (x**4 - 3) / math.sqrt(96),
            (x**5 - 10 * x**3) / math.sqrt(345),
            (x**6 - 15 * x**4 + 30) / math.sqrt(4770),
        ],
        axis=1,
    )
    emp = feats.T @ feats / m
    # exact standard errors: Var(f_i f_j) = E[f_i^2 f_j^2] - Sigma_ij^2 by Gaussian moments.
    # Plug-in estimates are unreliable here since f_5^4 grows like x^20.
    polys = [MOMENT_POLYNOMIALS[k] for k in (3, 4, 5, 6)]
    norms = [moment_variance(k) for k in (3, 4, 5, 6)]
    se = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            pij = poly_mul(polys[i], polys[j])
            fourth = gaussian_expectation(poly_mul(pij, pij)) / (norms[i] * norms[j])
            se[i, j] = math.sqrt(float(fourth) - Sn[i, j] ** 2) / math.sqrt(m)
    z = np.abs(emp - Sn) / se
    assert np.all(z <= 3), f"max |z| = {z.max():.2f}"

    diff = sigma_discrepancy()
    emitted = ", ".join(f"({i + 1},{j + 1}): {diff[i, j]:+.6f}" for i, j in ((1, 2), (1, 3), (2, 3)))
    assert time.perf_counter() - t0 < 30
    criterion(5, f"Gram=Sigma to 1e-12; empirical max |z|={z.max():.2f}; exact-minus-printed {emitted}")


@pytest.mark.slow
def test_distributional_checks(criterion):
    criterion(6)
    # R^HT, d = 3: squared norm of the order-3 Hermite vector
    vecs = simulate_hermite_vectors(5000, 3, 20_000, SEED, threads=default_threads())
    stat = np.sum(vecs**2, axis=1)
    ks_ht = ks_distance(stat, cdf=lambda t: 1.0 - chi2_sf(t, 3)).distance
    assert ks_ht <= 0.03
    pvals = chi2_sf(stat, 3)
    ks_p = ks_distance(pvals, cdf=lambda u: u).distance

    worst = 0.0
    m = 20_000
    for d in range(2, 9):
        s = simulate_snd_replicates(1000, d, m, SEED, threads=default_threads())
        var = float(np.mean(s**2))
        sigma_hat = math.sqrt((np.mean(s**4) - var**2) / m)
        worst = max(worst, abs(var - 1) / sigma_hat)
        assert abs(var - 1) <= 3 * sigma_hat, f"d={d}: var={var:.4f}, sigma_hat={sigma_hat:.4f}"

    # the 95% DKW band is close to exact at M = 1000 (coverage 0.9514), so "at least 190 of 200"
    # is met by a correct implementation only about 62% of the time. Assert that the observed
    # coverage is consistent with >= 95% (one-sided binomial test at the 1% level) and report the count.
    hits = sum(
        ks_distance(RandomStream(SEED, 1000 + r).normals(1000)).distance <= dkw_band(1000, 0.05)
        for r in range(200)
    )
    p_cov = float(stats.binom.cdf(hits, 200, 0.95))
    assert p_cov >= 0.01, f"DKW held {hits}/200, binomial p={p_cov:.4f}"
    criterion(
        6,
        f"KS(R^HT, chi2(3))={ks_ht:.4f} (p-values vs U(0,1): {ks_p:.4f}); "
        f"var(S_n,d) worst |z|={worst:.2f}; DKW held {hits}/200 (binomial p={p_cov:.2f} vs 95% coverage)",
    )


@pytest.mark.slow
def test_figure_one_desk_scale(criterion):
    criterion(7)
    config = ExperimentConfig(n=10_000, d_min=2, d_max=8, replicates=100_000, seed=SEED, threads=default_threads())
    rows = run_experiment(config)
    ks = {r.d: r.ks.distance for r in rows}
    fit = fit_power_exponential([(d, ks[d]) for d in sorted(ks)])
    vacuous = [r.d for r in rows if r.upper_bound >= 1]
    checks = {
        "ks increasing d=4..8": all(ks[d] < ks[d + 1] for d in range(4, 8)),
        "ks(8) > 5 ks(5)": ks[8] > 5 * ks[5],
        "fit c in [0.7, 1.4]": 0.7 <= fit.c <= 1.4,
        "ks <= thm1_upper": all(r.ks.distance <= r.upper_bound for r in rows),
    }
    table = " ".join(f"{d}:{ks[d]:.4g}" for d in sorted(ks))
    summary = (
        f"ks {table}; fit a={fit.a:.3g} b={fit.b:.3g} c={fit.c:.3f}; bound vacuous for d in {vacuous}; "
        + ", ".join(f"{name}={'ok' if ok else 'FAILED'}" for name, ok in checks.items())
    )
    assert all(checks.values()), summary
    criterion(7, summary)


def test_fit_exactness(criterion):
    criterion(8)
    d = np.arange(2, 9)
    truth = (0.0015, -2.19, 1.02)
    fit = fit_power_exponential(list(zip(d, eval_model(truth, d))))
    assert (fit.a, fit.b, fit.c) == pytest.approx(truth, rel=1e-10)
    const = fit_power_exponential([(k, 0.25) for k in d])
    assert (const.a, const.b, const.c) == pytest.approx((0.25, 0, 0), abs=1e-12)
    one = fit_power_exponential([(k, 1.0) for k in d])
    assert (one.a, one.b, one.c) == pytest.approx((1, 0, 0), abs=1e-12)
    with pytest.raises(RankDeficientError):
        fit_power_exponential([(2, 0.1), (3, 0.2)])
    criterion(8, f"recovered {fit.a:.17g}, {fit.b:.17g}, {fit.c:.17g}")


def test_determinism(criterion, tmp_path):
    criterion(9)
    t0 = time.perf_counter()
    args = ["experiment", "--n", "2000", "--d-min", "2", "--d-max", "5", "--replicates", "4000", "--seed", "7"]
    blobs = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}.csv"
        assert main(args + ["--threads", str(threads), "-o", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
    assert time.perf_counter() - t0 < 60
    criterion(9, f"experiment CSV byte-identical for --threads 1 and 4 ({len(blobs[0])} bytes)")
