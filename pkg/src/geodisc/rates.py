"""Log-log least-squares rate fits for convergence tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RateFit", "rate_fit"]


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points_used: int


def rate_fit(pairs, drop_first: int = 0) -> RateFit:
    """Fit ``log(value) = intercept + slope * log(N)``.

    ``pairs`` is an iterable of ``(N, value)``; the first ``drop_first``
    entries are discarded as warm-up.
    """
    arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)[drop_first:]
    if len(arr) < 2:
        raise ValueError("need at least two (N, value) pairs after dropping warm-up entries")
    if np.any(arr <= 0):
        raise ValueError("rate fit needs positive N and values")
    x, y = np.log(arr[:, 0]), np.log(arr[:, 1])
    if np.ptp(x) == 0:
        raise ValueError("rate fit needs at least two distinct N")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(resid @ resid) / ss_tot)
    return RateFit(float(slope), float(intercept), min(r2, 1.0), len(arr))
