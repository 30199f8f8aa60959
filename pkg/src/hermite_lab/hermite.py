"""Probabilists' Hermite polynomials: exact algebra and stable evaluation.

Exact objects use :class:`fractions.Fraction` coefficients so that Gaussian
expectations of products (orthogonality, fourth moments, covariance
normalisers) come out as exact rationals. Floating-point evaluation goes
through the normalised three-term recurrence

    phi_{q+1}(x) = (x * phi_q(x) - sqrt(q) * phi_{q-1}(x)) / sqrt(q + 1),

with ``phi_q = H_q / sqrt(q!)``, which stays O(1) where raw ``H_q`` overflows.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, sqrt

import numpy as np


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class ExactPolynomial:
    """Dense univariate polynomial over the rationals.

    ``coeffs[k]`` is the coefficient of ``x**k``; trailing zeros are trimmed,
    so the zero polynomial has no coefficients.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(Fraction(c) for c in self.coeffs))

    @classmethod
    def monomial(cls, k, coeff=1):
        return cls((0,) * k + (coeff,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        if not isinstance(other, ExactPolynomial):
            other = ExactPolynomial((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return ExactPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return ExactPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExactPolynomial):
            return poly_mul(self, other)
        return ExactPolynomial(c * Fraction(other) for c in self.coeffs)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ExactPolynomial((1,))
        for _ in range(k):
            out = poly_mul(out, self)
        return out

    def __call__(self, x):
        # Horner; exact for int/Fraction input, float otherwise
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def derivative(self):
        return ExactPolynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "ExactPolynomial(0)"
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            coef = str(c) if (k == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            terms.append(coef + ("*" if coef not in ("", "-") and mono else "") + mono)
        return "ExactPolynomial(" + " + ".join(terms).replace("+ -", "- ") + ")"


def poly_mul(p, r):
    """Exact product of two polynomials."""
    if not p.coeffs or not r.coeffs:
        return ExactPolynomial(())
    out = [Fraction(0)] * (len(p.coeffs) + len(r.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(r.coeffs):
            out[i + j] += a * b
    return ExactPolynomial(out)


@lru_cache(maxsize=None)
def hermite_coeffs(q):
    """Exact coefficients of ``H_q`` from ``H_{q+1} = x H_q - q H_{q-1}``.

    >>> hermite_coeffs(4)
    ExactPolynomial(x^4 - 6*x^2 + 3)
    """
    if q < 0:
        raise ValueError(f"Hermite order must be non-negative, got {q}")
    if q == 0:
        return ExactPolynomial((1,))
    prev, cur = ExactPolynomial((1,)), ExactPolynomial((0, 1))
    x = ExactPolynomial((0, 1))
    for k in range(1, q):
        prev, cur = cur, poly_mul(x, cur) - prev * k
    return cur


def double_factorial(k):
    """``k!!`` with the convention ``0!! = (-1)!! = 1``."""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True)
class GaussianMoment:
    """``E[G**order]`` for a standard normal ``G``, as an exact integer."""

    order: int
    value: int

    @classmethod
    def of(cls, order):
        return cls(order, gaussian_moment(order))


def gaussian_moment(k):
    if k < 0:
        raise ValueError("moment order must be non-negative")
    return 0 if k % 2 else double_factorial(k - 1)


def gaussian_expectation(p):
    """Exact ``E[p(G)]`` for ``G ~ N(0, 1)``."""
    return sum((c * gaussian_moment(k) for k, c in enumerate(p.coeffs) if k % 2 == 0), Fraction(0))


def fourth_moment_expanded(q):
    """``E[H_q(G)**4]`` by expanding ``H_q**4`` and integrating term by term."""
    h = hermite_coeffs(q)
    sq = poly_mul(h, h)
    value = gaussian_expectation(poly_mul(sq, sq))
    assert value.denominator == 1
    return int(value)


def fourth_moment_linearized(q):
    """``E[H_q(G)**4] = sum_r (r!)^2 C(q, r)^4 (2q - 2r)!``."""
    return sum(factorial(r) ** 2 * comb(q, r) ** 4 * factorial(2 * q - 2 * r) for r in range(q + 1))


@lru_cache(maxsize=None)
def hermite_fourth_moment(q):
    """Exact ``E[H_q(G)**4]``, cross-checked between two independent routes.

    >>> [hermite_fourth_moment(q) for q in range(4)]
    [1, 3, 60, 3348]
    """
    if q < 0:
        raise ValueError(f"Hermite order must be non-negative, got {q}")
    a = fourth_moment_expanded(q)
    b = fourth_moment_linearized(q)
    if a != b:
        raise ArithmeticError(f"fourth-moment routes disagree at q={q}: {a} != {b}")
    return a


class NormalizedHermiteEvaluator:
    """Vectorised evaluation of ``phi_0..phi_d`` at many points.

    Parameters
    ----------
    max_order : int
        Highest order ``d`` produced.
    """

    def __init__(self, max_order):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.max_order = int(max_order)
        q = np.arange(max(self.max_order, 1), dtype=np.float64)
        self._sqrt_q = np.sqrt(q)
        self._inv_sqrt_q1 = 1.0 / np.sqrt(q + 1.0)

    def __call__(self, x):
        """Return an array of shape ``x.shape + (max_order + 1,)``."""
        x = np.asarray(x, dtype=np.float64)
        out = np.empty(x.shape + (self.max_order + 1,), dtype=np.float64)
        out[..., 0] = 1.0
        if self.max_order >= 1:
            out[..., 1] = x
        for q in range(1, self.max_order):
            out[..., q + 1] = (x * out[..., q] - self._sqrt_q[q] * out[..., q - 1]) * self._inv_sqrt_q1[q]
        return out


def eval_normalized(x, d):
    """``(phi_1(x), ..., phi_d(x))`` with ``phi_q = H_q / sqrt(q!)``.

    Scalars give a length-``d`` vector; arrays gain a trailing axis of size ``d``.

    >>> eval_normalized(2.0, 3).round(12).tolist()
    [2.0, 2.121320343560, 0.816496580928]
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return NormalizedHermiteEvaluator(d)(x)[..., 1:]


def abs_third_moment_mc(q, sample_count, rng, batches=100):
    """Monte-Carlo estimate of ``E[|H_q(G)|^3]``.

    Returns ``(estimate, standard_error)``; the error comes from ``batches``
    equal-size batch means (fewer when ``sample_count`` is small).
    """
    if q < 0 or sample_count < 1:
        raise ValueError("need q >= 0 and sample_count >= 1")
    if q == 0:
        return 1.0, 0.0
    g = rng.normals(sample_count)
    scale = sqrt(factorial(q))
    vals = np.abs(NormalizedHermiteEvaluator(q)(g)[:, q] * scale) ** 3
    est = float(vals.mean())
    b = min(batches, sample_count)
    if b < 2:
        return est, float("nan")
    usable = (sample_count // b) * b
    means = vals[:usable].reshape(b, -1).mean(axis=1)
    return est, float(means.std(ddof=1) / sqrt(b))
