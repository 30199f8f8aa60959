"""Reference distribution functions used by the tests and the KS estimator."""

import numpy as np
from scipy import special as _sp


def normal_cdf(x):
    """Standard normal CDF; scalar in, float out, array in, array out."""
    out = _sp.ndtr(np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def chi2_sf(x, k):
    """Survival function of chi-square with ``k`` degrees of freedom.

    Regularised upper incomplete gamma ``Q(k/2, x/2)``.
    """
    if k <= 0 or int(k) != k:
        raise ValueError(f"degrees of freedom must be a positive integer, got {k}")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("chi2_sf is defined for x >= 0")
    out = _sp.gammaincc(k / 2.0, arr / 2.0)
    return float(out) if np.ndim(out) == 0 else out
