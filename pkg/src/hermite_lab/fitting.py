"""Least-squares fit of ``y = a * d**b * exp(c * d)``.

The model is linear after taking logs, ``ln y = ln a + b ln d + c d``, so the
fit is ordinary least squares on the design ``[1, ln d, d]``.
"""

from dataclasses import dataclass

import numpy as np

# coefficients reported for the n = 100,000 curve, kept for comparison
REFERENCE_FIT = (0.0015, -2.19, 1.02)


class RankDeficientError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    residuals: tuple
    r_squared_log: float
    stderr: tuple
    d: tuple
    y: tuple

    def as_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "stderr": {"ln_a": self.stderr[0], "b": self.stderr[1], "c": self.stderr[2]},
            "r_squared_log": self.r_squared_log,
            "residuals": list(self.residuals),
            "d": list(self.d),
            "y": list(self.y),
        }


def _design(d):
    return np.column_stack([np.ones_like(d), np.log(d), d])


def fit_power_exponential(points):
    """Fit ``(a, b, c)`` to ``[(d, y), ...]`` by log-space least squares.

    Raises
    ------
    ValueError
        If any ``d`` or ``y`` is not strictly positive.
    RankDeficientError
        If the design ``[1, ln d, d]`` does not have full column rank
        (fewer than three distinct ``d``).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (d, y) pairs")
    d, y = pts[:, 0], pts[:, 1]
    if np.any(d <= 0) or np.any(y <= 0) or not np.all(np.isfinite(pts)):
        raise ValueError("all d and y must be finite and > 0")
    X = _design(d)
    if len(np.unique(d)) < 3 or np.linalg.matrix_rank(X) < 3:
        raise RankDeficientError("need at least three distinct d values for a full-rank fit")
    ly = np.log(y)
    # normal equations, LU with partial pivoting; column scaling keeps them well conditioned
    scale = np.linalg.norm(X, axis=0)
    Xs = X / scale
    gram = Xs.T @ Xs
    beta = np.linalg.solve(gram, Xs.T @ ly) / scale
    # one step of iterative refinement on the unscaled residual
    resid = ly - X @ beta
    beta = beta + np.linalg.solve(gram, Xs.T @ resid) / scale
    resid = ly - X @ beta

    ss_res = float(resid @ resid)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = len(d) - 3
    if dof > 0:
        sigma2 = ss_res / dof
        cov = sigma2 * np.linalg.inv(gram) / np.outer(scale, scale)
        stderr = tuple(float(s) for s in np.sqrt(np.diag(cov)))
    else:
        stderr = (float("nan"),) * 3
    return FitResult(
        a=float(np.exp(beta[0])),
        b=float(beta[1]),
        c=float(beta[2]),
        residuals=tuple(float(r) for r in resid),
        r_squared_log=r2,
        stderr=stderr,
        d=tuple(float(v) for v in d),
        y=tuple(float(v) for v in y),
    )


def eval_model(fit, d):
    """``a * d**b * exp(c * d)``; ``fit`` may be a FitResult or an ``(a, b, c)`` tuple."""
    a, b, c = (fit.a, fit.b, fit.c) if isinstance(fit, FitResult) else fit
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= 0):
        raise ValueError("d must be > 0")
    out = a * d**b * np.exp(c * d)
    return float(out) if out.ndim == 0 else out
