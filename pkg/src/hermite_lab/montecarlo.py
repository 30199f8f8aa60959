"""Monte-Carlo estimation of the Kolmogorov distance of ``S_{n,d}`` to N(0, 1).

``S_{n,d} = n^{-1/2} sum_k phi_d(G_k)`` is the last coordinate of the Hermite
statistic. Replicate ``r`` for order ``d`` reads
``RandomStream(derive_seed(seed, d), r)``; each replicate is computed start to
finish by one worker with a fixed summation order, so rows are bit-identical
for any thread count.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .bounds import thm1_upper
from .rng import RandomStream, derive_seed, next_normal, seed_state
from .special import normal_cdf

BLOCK = 2048


@njit(cache=True, nogil=True)
def _accumulate_hermite(state, spare, n, d, coef_a, coef_b, acc):
    """Add ``sum_k phi_q(g_k)`` for ``q = 1..d`` over ``n`` draws into ``acc``."""
    for _ in range(n):
        g = next_normal(state, spare)
        prev = 1.0
        cur = g
        acc[0] += cur
        for q in range(1, d):
            nxt = (g * cur - coef_a[q] * prev) * coef_b[q]
            prev = cur
            cur = nxt
            acc[q] += cur


@njit(cache=True, nogil=True)
def _replicate_block(seed, first, count, n, d, coef_a, coef_b, out):
    state = np.empty(4, dtype=np.uint64)
    spare = np.empty(2, dtype=np.float64)
    acc = np.empty(d, dtype=np.float64)
    scale = 1.0 / math.sqrt(n)
    for r in range(count):
        seed_state(seed, np.uint64(first + r), state, spare)
        acc[:] = 0.0
        _accumulate_hermite(state, spare, n, d, coef_a, coef_b, acc)
        for q in range(d):
            out[r, q] = acc[q] * scale


def _recurrence_coefs(d):
    q = np.arange(max(d, 1), dtype=np.float64)
    return np.sqrt(q), 1.0 / np.sqrt(q + 1.0)


def default_threads():
    env = os.environ.get("HERMITE_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate_hermite_vectors(n, d, replicates, seed, threads=1, first_stream=0):
    """Hermite vectors ``S_n`` (order ``d``) for replicates on streams
    ``first_stream .. first_stream + replicates - 1`` of ``seed``.

    Returns an array of shape ``(replicates, d)``.
    """
    if n < 1 or d < 1 or replicates < 1:
        raise ValueError("need n >= 1, d >= 1, replicates >= 1")
    a, b = _recurrence_coefs(d)
    out = np.empty((replicates, d), dtype=np.float64)
    seed = np.uint64(seed)
    starts = range(0, replicates, BLOCK)

    def work(start):
        count = min(BLOCK, replicates - start)
        _replicate_block(seed, first_stream + start, count, n, d, a, b, out[start : start + count])

    if threads <= 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    return out


def simulate_snd(n, d, rng):
    """One draw of ``S_{n,d}`` consuming ``n`` normals from ``rng``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    a, b = _recurrence_coefs(d)
    acc = np.zeros(d, dtype=np.float64)
    _accumulate_hermite(rng.state, rng.spare, n, d, a, b, acc)
    return float(acc[d - 1] * (1.0 / math.sqrt(n)))


@dataclass(frozen=True)
class KsEstimate:
    distance: float
    replicates: int
    dkw_95: float


def dkw_band(m, alpha=0.05):
    """Dvoretzky-Kiefer-Wolfowitz half-width ``sqrt(ln(2/alpha) / (2m))``."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * m))


def ks_distance(sample, cdf=normal_cdf):
    """One-sample Kolmogorov distance ``sup_x |F_M(x) - cdf(x)|``.

    ``cdf`` must accept a sorted float array.

    >>> round(ks_distance([-1.0, 1.0]).distance, 6)
    0.341345
    """
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    x = np.sort(x)
    m = x.size
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, m + 1, dtype=np.float64)
    dist = max(float(np.max(i / m - f)), float(np.max(f - (i - 1) / m)))
    return KsEstimate(min(max(dist, 0.0), 1.0), m, dkw_band(m))


@dataclass(frozen=True)
class KsExperimentRow:
    d: int
    n: int
    replicates: int
    ks: KsEstimate
    upper_bound: float
    seed: int

    CSV_HEADER = ("d", "n", "replicates", "ks", "dkw95", "upper_bound", "seed")

    def csv_fields(self):
        return (self.d, self.n, self.replicates, self.ks.distance, self.ks.dkw_95, self.upper_bound, self.seed)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 100_000
    d_min: int = 2
    d_max: int = 8
    replicates: int = 100_000
    seed: int = 42
    threads: int = 1

    def validate(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.d_min < 1 or self.d_max < self.d_min:
            raise ValueError("need 1 <= d_min <= d_max")
        if self.replicates < 2:
            raise ValueError("replicates must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def replicate_seed(seed, d):
    """Seed of the stream family used for order ``d``."""
    return derive_seed(seed, d)


def simulate_snd_replicates(n, d, replicates, seed, threads=1):
    """``replicates`` independent draws of ``S_{n,d}`` for experiment seed ``seed``."""
    return simulate_hermite_vectors(n, d, replicates, replicate_seed(seed, d), threads)[:, d - 1]


def run_experiment(config):
    """KS distance of ``S_{n,d}`` to N(0, 1) for each ``d`` in the configured range."""
    config.validate()
    rows = []
    for d in range(config.d_min, config.d_max + 1):
        sample = simulate_snd_replicates(config.n, d, config.replicates, config.seed, config.threads)
        rows.append(
            KsExperimentRow(
                d=d,
                n=config.n,
                replicates=config.replicates,
                ks=ks_distance(sample, normal_cdf),
                upper_bound=float(thm1_upper(config.n, d)),
                seed=config.seed,
            )
        )
    return rows


def normal_sample(size, seed=42, stream_id=0):
    return RandomStream(seed, stream_id).normals(size)
