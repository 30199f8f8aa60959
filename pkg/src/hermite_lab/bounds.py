"""Explicit finite-sample bounds for the Hermite moment statistic.

Everything is evaluated with :mod:`mpmath` in log space at ``WORKING_DPS``
decimal digits (well beyond double precision), so the exponential factors
``2**(3d/2)`` neither overflow nor lose digits when forms are compared.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import mpmath
from mpmath import mpf

from .hermite import hermite_fourth_moment

WORKING_DPS = 40

LOWER_BOUND_CAVEAT = (
    "lower bound holds only for n >= N_d; N_d exists but is not constructive "
    "(min_Nd gives a necessary floor only)"
)

# printed values kept for side-by-side reporting; never used as ground truth
PRINTED_C4 = 923.44
PRINTED_C6 = 673794.4769
PRINTED_SB_CONSTANT = 924
PRINTED_HM4_CONSTANT = 673795


def _ctx():
    return mpmath.workdps(WORKING_DPS)


def _rate_exponent():
    # e^{3 log 2 / 2} = 2^{3/2}
    return 3 * mpmath.log(2) / 2


def upper_constant():
    """``C = 58 * 2^{3/2} / (2^{3/2} - 1)``."""
    with _ctx():
        r = mpmath.exp(_rate_exponent())
        return +(58 * r / (r - 1))


def lower_constant():
    """``c = (8 e pi^3)^{-1/4} * 2^{-3/2}``."""
    with _ctx():
        return +((8 * mpmath.e * mpmath.pi**3) ** mpf(-0.25) * mpmath.exp(-_rate_exponent()))


def _check_pos(name, value, minimum=1):
    if int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value}")


def thm1_upper(n, d):
    """Upper bound ``C d^{3/4} 2^{3d/2} / sqrt(n)`` on the convex distance."""
    _check_pos("n", n)
    _check_pos("d", d)
    with _ctx():
        log_val = (
            mpmath.log(upper_constant())
            + mpf(3) / 4 * mpmath.log(d)
            + d * _rate_exponent()
            - mpmath.log(n) / 2
        )
        return +mpmath.exp(log_val)


def thm1_lower(n, d):
    """Lower rate ``c d^{-3/4} 2^{3d/2} / sqrt(n)``, asserted only for ``n >= N_d``.

    Returns ``(value, caveat)``.
    """
    _check_pos("n", n)
    _check_pos("d", d, minimum=2)
    with _ctx():
        log_val = (
            mpmath.log(lower_constant())
            - mpf(3) / 4 * mpmath.log(d)
            + d * _rate_exponent()
            - mpmath.log(n) / 2
        )
        return +mpmath.exp(log_val), LOWER_BOUND_CAVEAT


def min_Nd(d):
    """Smallest ``N_d`` compatible with ``d_K <= 1``.

    Returns ``(floor_value, integer_ceiling)``.
    """
    _check_pos("d", d, minimum=2)
    with _ctx():
        log_val = (
            3 * (d - 1) * mpmath.log(2)
            - mpf(3) / 2 * mpmath.log(d)
            - mpmath.log(mpmath.e * mpmath.pi**3 * 8) / 2
        )
        val = mpmath.exp(log_val)
        return +val, max(1, int(mpmath.ceil(val)))


def jensen_summand(i):
    """``E[H_i^4]^{3/4} / (i!)^{3/2}`` = ``(E[H_i^4] / (i!)^2)^{3/4}``."""
    with _ctx():
        ratio = mpmath.mpf(hermite_fourth_moment(i)) / mpmath.mpf(factorial(i)) ** 2
        return +(ratio ** mpf(0.75))


def small_d_prefactor(d):
    """``d^{1/2} (42 d^{1/4} + 16)``."""
    with _ctx():
        return +(mpmath.sqrt(d) * (42 * mpmath.root(d, 4) + 16))


def exact_constant_cd(d):
    """Small-``d`` constant ``C_d`` built from exact Hermite fourth moments."""
    _check_pos("d", d)
    with _ctx():
        return +(small_d_prefactor(d) * mpmath.fsum(jensen_summand(i) for i in range(1, d + 1)))


def printed_constant_expression(d):
    """Evaluate the closed forms printed for ``C_4`` and ``C_6`` verbatim.

    The printed forms write the ``i = 4`` summand as ``3 * 71^{3/4} * sqrt(7)``;
    the exact value is ``639^{3/4} = 3 * sqrt(3) * 71^{3/4}``.
    """
    with _ctx():
        p = lambda v: mpf(v) ** mpf(0.75)  # noqa: E731
        head = p(3) + p(15) + 3 * p(71) * mpmath.sqrt(7) + p(93)
        if d == 4:
            return +(4 * (8 + 21 * mpmath.sqrt(2)) * head)
        if d == 6:
            tail = 3 * p(517) * mpmath.sqrt(3) + p(35169)
            return +(2 * mpmath.sqrt(6) * (8 + 21 * mpmath.root(6, 4)) * (head + tail))
    raise ValueError("printed closed forms exist only for d = 4 and d = 6")


def printed_constant_value(d):
    return {4: PRINTED_C4, 6: PRINTED_C6}.get(d)


@dataclass(frozen=True)
class LowerRateCertificate:
    d: int
    exact_rate: object
    stirling_floor: object
    squared_rate_rational: Fraction

    @property
    def holds(self):
        return self.exact_rate >= self.stirling_floor


def lower_rate(d):
    """``sqrt(n) Psi(n) |zeta(d)|`` for even ``d`` with its Stirling floor.

    Two closed forms are evaluated in log space and must agree; the squared
    rate is also formed as an exact rational from both forms.
    """
    _check_pos("d", d, minimum=2)
    if d % 2:
        raise ValueError(f"lower_rate is defined for even d only, got {d}; reduce odd d to d-1")
    h = d // 2
    lg = mpmath.loggamma
    with _ctx():
        log_form_a = (
            mpmath.log(d)
            + lg(h)
            + 2 * mpmath.log(comb(d - 1, h - 1))
            - lg(d + 1) / 2
        )
        log_form_b = lg(d + 1) / 2 + lg(d) - lg(h) - 2 * lg(h + 1)
        a = mpmath.exp(log_form_a)
        b = mpmath.exp(log_form_b)
        if abs(a - b) > mpf("1e-12") * abs(b):
            raise ArithmeticError(f"lower-rate closed forms disagree at d={d}: {a} vs {b}")
        floor = mpmath.exp(3 * d * mpmath.log(2) / 2 - mpf(3) / 4 * mpmath.log(d)) / (
            8 * mpmath.e * mpmath.pi**3
        ) ** mpf(0.25)

    sq_a = Fraction((d * factorial(h - 1) * comb(d - 1, h - 1) ** 2) ** 2, factorial(d))
    sq_b = Fraction(factorial(d) * factorial(d - 1) ** 2, factorial(h - 1) ** 2 * factorial(h) ** 4)
    if sq_a != sq_b:
        raise ArithmeticError(f"squared lower-rate forms disagree at d={d}")
    return LowerRateCertificate(d, +b, +floor, sq_b)


def kurtosis_excess(d):
    """``E[H_{d-1}^4] / ((d-1)!)^2 - 1`` as an exact rational."""
    _check_pos("d", d, minimum=2)
    return Fraction(hermite_fourth_moment(d - 1), factorial(d - 1) ** 2) - 1


def stirling_bracket(n):
    """``(sqrt(2 pi n)(n/e)^n, e^{1/12} sqrt(2 pi n)(n/e)^n)``."""
    _check_pos("n", n)
    with _ctx():
        lo = mpmath.sqrt(2 * mpmath.pi * n) * (mpf(n) / mpmath.e) ** n
        return +lo, +(lo * mpmath.exp(mpf(1) / 12))


@dataclass
class BoundReport:
    n: int
    d: int
    upper: float
    lower: float | None
    n_d_necessity: float | None
    n_d_ceiling: int | None
    exact_constant_cd: float
    exact_upper: float
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {
            "n": self.n,
            "d": self.d,
            "upper": self.upper,
            "lower": self.lower,
            "n_d_necessity": self.n_d_necessity,
            "n_d_ceiling": self.n_d_ceiling,
            "exact_constant_cd": self.exact_constant_cd,
            "exact_upper": self.exact_upper,
            "notes": list(self.notes),
        }


def bound_report(n, d):
    """Collect every bound for ``(n, d)``; ``lower`` fields are empty for ``d = 1``."""
    upper = thm1_upper(n, d)
    cd = exact_constant_cd(d)
    notes = []
    lower = nd = nd_ceil = None
    if d >= 2:
        lo, caveat = thm1_lower(n, d)
        lower = float(lo)
        nd_val, nd_ceil = min_Nd(d)
        nd = float(nd_val)
        notes.append(caveat)
        if n < nd_ceil:
            notes.append(f"n < {nd_ceil}: the lower bound would exceed 1 here, so N_d > n")
    else:
        notes.append("no lower bound for d = 1")
    if upper >= 1:
        notes.append("upper bound >= 1 is vacuous")
    if d > 20:
        notes.append("exact small-d constant evaluated outside its intended range (d <= 20)")
    return BoundReport(
        n=int(n),
        d=int(d),
        upper=float(upper),
        lower=lower,
        n_d_necessity=nd,
        n_d_ceiling=nd_ceil,
        exact_constant_cd=float(cd),
        exact_upper=float(cd / mpmath.sqrt(n)),
        notes=notes,
    )
