"""Power-law fits on log-log axes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares line ``log value = exponent * log lambda + intercept``."""

    exponent: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]

    def as_dict(self) -> dict:
        return {"exponent": self.exponent, "intercept": self.intercept,
                "r_squared": self.r_squared, "n_points": len(self.points)}


def _linear_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    # constant data is fitted exactly by a zero slope
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), float(intercept), r2


def fit_growth(points) -> GrowthFit:
    """Fit ``value ~ C * lambda**exponent`` to ``(lambda, value)`` pairs."""
    points = [(float(x), float(y)) for x, y in points]
    if len(points) < 4:
        raise ValueError(f"need at least 4 points, got {len(points)}")
    for i, (x, y) in enumerate(points):
        if not (x > 0 and math.isfinite(x)):
            raise ValueError(f"point {i}: lambda must be positive (got {x!r})")
        if not (y > 0 and math.isfinite(y)):
            raise ValueError(f"point {i}: value must be positive (got {y!r} at lambda={x!r})")
    logs = np.log(np.array(points))
    slope, intercept, r2 = _linear_fit(logs[:, 0], logs[:, 1])
    return GrowthFit(slope, intercept, r2, tuple(map(tuple, logs.tolist())))


def fit_exponential(times, values) -> tuple[float, float]:
    """Slope of ``log value`` against time, and its r^2."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 2:
        raise ValueError("need at least 2 samples")
    if np.any(v <= 0):
        raise ValueError("values must be positive")
    slope, _, r2 = _linear_fit(t, np.log(v))
    return slope, r2
