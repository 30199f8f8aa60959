"""Moment and Hermite test statistics for standard normality.

All statistics use the known-mean/known-variance convention: the data are
compared against N(0, 1) directly, with no self-normalisation.

Sums over a sample are accumulated in chunks of ``CHUNK`` points and the
chunk totals are combined with :func:`math.fsum`, so results do not depend on
how the chunks are processed.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .hermite import (
    ExactPolynomial,
    NormalizedHermiteEvaluator,
    double_factorial,
    gaussian_expectation,
    gaussian_moment,
    hermite_coeffs,
    poly_mul,
)
from .rng import RandomStream
from .special import chi2_sf

CHUNK = 4096

RAW_MOMENT = "RawMoment"
HERMITE = "Hermite"

_X = ExactPolynomial((0, 1))

# centred moment polynomials behind SB / HM4 / M5 / M6, keyed by moment order
MOMENT_POLYNOMIALS = {
    3: _X**3,
    4: _X**4 - 3,
    5: _X**5 - _X**3 * 10,
    6: _X**6 - _X**4 * 15 + 30,
}

# the same polynomials written in the Hermite basis
HERMITE_EXPANSIONS = {
    3: {3: 1, 1: 3},
    4: {4: 1, 2: 6},
    5: {5: 1, 1: -15},
    6: {6: 1, 2: -45},
}


def moment_variance(order):
    """Exact ``E[p(G)^2]`` for the centred moment polynomial of ``order``."""
    p = MOMENT_POLYNOMIALS[order]
    return gaussian_expectation(poly_mul(p, p))


@dataclass(frozen=True)
class StatisticVector:
    values: np.ndarray
    n: int
    d: int
    basis: str


@dataclass
class TestResult:
    name: str
    statistic: float
    reference: str
    df: int | None = None
    p_value: float | None = None
    notes: list = field(default_factory=list)

    __test__ = False  # not a pytest class

    def as_dict(self):
        out = {"test": self.name, "statistic": self.statistic, "reference": self.reference}
        if self.p_value is not None:
            out["p_value"] = self.p_value
        out["notes"] = list(self.notes)
        return out


def _as_data(data):
    x = np.asarray(data, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty data")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contain non-finite values")
    return x


def _chunked_sums(x, features):
    """Column sums of ``features(chunk)`` combined exactly across chunks."""
    partials = [features(x[i : i + CHUNK]).sum(axis=0) for i in range(0, x.size, CHUNK)]
    partials = np.atleast_2d(np.array(partials))
    return np.array([math.fsum(col) for col in partials.T])


def hermite_vector(data, d):
    """``n^{-1/2} sum_k (phi_1(x_k), ..., phi_d(x_k))``."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    x = _as_data(data)
    ev = NormalizedHermiteEvaluator(d)
    sums = _chunked_sums(x, lambda c: ev(c)[:, 1:])
    return StatisticVector(sums / math.sqrt(x.size), x.size, d, HERMITE)


def raw_moment_normalizer(q):
    """``(2q - 1)!! - m_q^2`` with ``m_q = E[G^q]``."""
    norm = double_factorial(2 * q - 1) - gaussian_moment(q) ** 2
    if norm <= 0:
        raise ValueError(f"raw-moment normaliser vanishes at q={q}")
    return norm


def raw_moment_vector(data, d):
    """``n^{-1/2} sum_k ((x_k^q - m_q) / sqrt((2q-1)!! - m_q^2))_{q=1..d}``."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    x = _as_data(data)
    qs = np.arange(1, d + 1)
    means = np.array([float(gaussian_moment(int(q))) for q in qs])
    scale = np.array([1.0 / math.sqrt(raw_moment_normalizer(int(q))) for q in qs])
    sums = _chunked_sums(x, lambda c: (c[:, None] ** qs - means) * scale)
    return StatisticVector(sums / math.sqrt(x.size), x.size, d, RAW_MOMENT)


@dataclass(frozen=True)
class RadicalMatrix:
    """Matrix whose entries are ``sign * sqrt(r)`` with ``r`` an exact rational.

    ``entries[i][j]`` holds ``(sign, r)``; this keeps every entry exact and
    gives each one a readable provenance string.
    """

    entries: tuple
    label: str = ""

    @classmethod
    def from_ratio(cls, numerators, denominator_squares, label=""):
        """Entries ``num / sqrt(den_sq)``."""
        rows = []
        for row_num, row_den in zip(numerators, denominator_squares):
            row = []
            for num, den_sq in zip(row_num, row_den):
                num = Fraction(num)
                row.append((1 if num >= 0 else -1, num * num / Fraction(den_sq)))
            rows.append(tuple(row))
        return cls(tuple(rows), label)

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def exact(self, i, j):
        return self.entries[i][j]

    def to_mpmath(self):
        rows, cols = self.shape
        m = mpmath.matrix(rows, cols)
        for i in range(rows):
            for j in range(cols):
                s, r = self.entries[i][j]
                m[i, j] = s * mpmath.sqrt(mpmath.mpf(r.numerator) / r.denominator)
        return m

    def to_numpy(self):
        return np.array(self.to_mpmath().tolist(), dtype=np.float64)

    def provenance(self):
        def fmt(s, r):
            if r == 0:
                return "0"
            sign = "-" if s < 0 else ""
            root = math.isqrt(r.numerator) ** 2 == r.numerator and math.isqrt(r.denominator) ** 2 == r.denominator
            if root:
                v = Fraction(math.isqrt(r.numerator), math.isqrt(r.denominator))
                return f"{sign}{v}"
            return f"{sign}sqrt({r})"

        return [[fmt(*e) for e in row] for row in self.entries]


TransformMatrix = RadicalMatrix


def raw_moment_covariance(d):
    """Null covariance of :func:`raw_moment_vector`, exact.

    Entry ``(i, j)`` is ``(E[G^{i+j}] - m_i m_j) / sqrt(v_i v_j)``.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    qs = range(1, d + 1)
    nums = [[gaussian_moment(i + j) - gaussian_moment(i) * gaussian_moment(j) for j in qs] for i in qs]
    dens = [[raw_moment_normalizer(i) * raw_moment_normalizer(j) for j in qs] for i in qs]
    return RadicalMatrix.from_ratio(nums, dens, label=f"raw-moment covariance d={d}")


def _hermite_row(order, width):
    """Coefficients of the standardised moment polynomial on ``phi_1..phi_width``."""
    p = MOMENT_POLYNOMIALS[order]
    var = moment_variance(order)
    nums, dens = [], []
    for q in range(1, width + 1):
        nums.append(gaussian_expectation(poly_mul(p, hermite_coeffs(q))))
        dens.append(var * math.factorial(q))
    return nums, dens


def _unit_row(k, width):
    return [1 if q == k else 0 for q in range(1, width + 1)], [1] * width


def _delta(orders, width, pad, label):
    nums, dens = [], []
    for order in orders:
        n_, d_ = _hermite_row(order, width)
        nums.append(n_)
        dens.append(d_)
    for k in pad:
        n_, d_ = _unit_row(k, width)
        nums.append(n_)
        dens.append(d_)
    return RadicalMatrix.from_ratio(nums, dens, label=label)


def sb_delta():
    """4x4 map from ``(phi_1..phi_4)`` to ``(M3, M4, phi_3, phi_4)``."""
    return _delta((3, 4), 4, (3, 4), "SB Delta")


def hm4_delta(extended=True):
    """Map from ``(phi_1..phi_6)`` to ``(M3, M4, M5, M6)``; padded with
    ``phi_5, phi_6`` to a square invertible 6x6 matrix when ``extended``."""
    return _delta((3, 4, 5, 6), 6, (5, 6) if extended else (), "HM4 Delta")


def hm4_sigma_symbolic():
    """Exact null covariance of the four HM4 components."""
    orders = (3, 4, 5, 6)
    nums = [[gaussian_expectation(poly_mul(MOMENT_POLYNOMIALS[a], MOMENT_POLYNOMIALS[b])) for b in orders] for a in orders]
    dens = [[moment_variance(a) * moment_variance(b) for b in orders] for a in orders]
    return RadicalMatrix.from_ratio(nums, dens, label="HM4 Sigma (exact Gram)")


def hm4_sigma_printed():
    """The HM4 covariance exactly as printed in the source, for comparison only."""
    s23 = -3 * math.sqrt(23) / 23
    s115 = -3 * math.sqrt(115) / 46
    s3657 = 45 * math.sqrt(3657) / 4876
    return np.array(
        [
            [1.0, 0.0, s23, 0.0],
            [0.0, 1.0, s115, 0.0],
            [s23, s115, 1.0, s3657],
            [0.0, 0.0, s3657, 1.0],
        ]
    )


def sigma_discrepancy():
    """Entrywise ``printed - exact`` for the HM4 covariance."""
    return hm4_sigma_printed() - hm4_sigma_symbolic().to_numpy()


def moment_components(data, route="raw"):
    """Standardised HM4 components ``(M3, M4, M5, M6)`` of a sample.

    ``route="raw"`` sums the moment polynomials directly; ``route="hermite"``
    maps the order-6 Hermite vector through the HM4 Delta matrix.
    """
    x = _as_data(data)
    if route == "raw":
        scale = np.array([1.0 / math.sqrt(moment_variance(k)) for k in (3, 4, 5, 6)])

        def feats(c):
            c2 = c * c
            c3 = c2 * c
            c4 = c2 * c2
            return np.stack([c3, c4 - 3.0, c4 * c - 10.0 * c3, c4 * c2 - 15.0 * c4 + 30.0], axis=1) * scale

        return _chunked_sums(x, feats) / math.sqrt(x.size)
    if route == "hermite":
        return hm4_delta(extended=False).to_numpy() @ hermite_vector(x, 6).values
    raise ValueError(f"unknown route {route!r}")


def _chi2_result(name, stat, df, notes=()):
    return TestResult(name, float(stat), f"chi2({df})", df, float(chi2_sf(stat, df)), list(notes))


def ht_statistic(data, d):
    s = hermite_vector(data, d)
    return _chi2_result("HT", float(np.dot(s.values, s.values)), d)


def sb_statistic(data, route="raw"):
    m = moment_components(data, route)
    return _chi2_result("SB", m[0] ** 2 + m[1] ** 2, 2)


def hm4_statistic(data, route="raw"):
    m = moment_components(data, route)
    return TestResult(
        "HM4",
        float(np.dot(m, m)),
        "quadform(N_4(0, Sigma_HM4))",
        notes=["limit law is not chi-square: quadratic form of a correlated Gaussian"],
    )


def m5_statistic(data, route="raw"):
    return _chi2_result("M5", moment_components(data, route)[2] ** 2, 1)


def m6_statistic(data, route="raw"):
    return _chi2_result("M6", moment_components(data, route)[3] ** 2, 1)


def hm2_statistic(data, route="raw"):
    m = moment_components(data, route)
    return _chi2_result("HM2", m[2] ** 2 + m[3] ** 2, 2)


def hm4_mc_pvalue(statistic, replicates, seed=42):
    """Monte-Carlo p-value of HM4 under its Gaussian quadratic-form limit.

    Returns ``(1 + #{Q >= statistic}) / (1 + replicates)``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    chol = np.linalg.cholesky(hm4_sigma_symbolic().to_numpy())
    g = RandomStream(seed, 0).normals(4 * replicates).reshape(replicates, 4)
    z = g @ chol.T
    q = np.einsum("ij,ij->i", z, z)
    return float((1 + np.count_nonzero(q >= statistic)) / (1 + replicates))


TESTS = {
    "sb": sb_statistic,
    "hm4": hm4_statistic,
    "m5": m5_statistic,
    "m6": m6_statistic,
    "hm2": hm2_statistic,
}
