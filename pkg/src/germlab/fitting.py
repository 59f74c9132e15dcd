"""Log-log least squares: the exponent estimate behind every scaling check."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateWindow


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    log_intercept: float
    residual_max: float
    r2: float
    sample_count: int
    window: tuple
    slope_stderr: float = 0.0
    curvature: float = 0.0

    @property
    def constant(self):
        return float(np.exp(self.log_intercept))

    def predict(self, s):
        return np.exp(self.log_intercept + self.slope * np.log(s))

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        d["constant"] = self.constant
        return d


def _lstsq_line(x, y):
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    slope = float(dx @ (y - ym)) / sxx
    return slope, ym - slope * xm


def fit_power_law(pairs, min_decades=1.0, min_count=10) -> ScalingFit:
    """Fit ``t = C s^beta`` by least squares on ``(log s, log t)``.

    ``curvature`` is the quadratic coefficient of a second-order fit in
    ``log s``; it exposes log corrections that a clean power law lacks.
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must be a sequence of (s, t)")
    s, t = arr[:, 0], arr[:, 1]
    if np.any(s <= 0) or np.any(t <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("all s and t must be positive and finite")
    if len(s) < min_count:
        raise DegenerateWindow(f"need at least {min_count} pairs, got {len(s)}")
    span = np.log10(s.max() / s.min())
    if span < min_decades - 1e-12:
        raise DegenerateWindow(f"window spans {span:.3g} decades, need {min_decades}")
    x, y = np.log(s), np.log(t)
    slope, icpt = _lstsq_line(x, y)
    res = y - (icpt + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(res @ res) / ss_tot if ss_tot > 0 else 1.0
    n = len(x)
    dx = x - x.mean()
    stderr = float(np.sqrt((res @ res) / max(n - 2, 1) / (dx @ dx))) if n > 2 else 0.0
    curv = 0.0
    if n >= 4:
        curv = float(np.polyfit(x, y, 2)[0])
    return ScalingFit(
        slope=float(slope),
        log_intercept=float(icpt),
        residual_max=float(np.max(np.abs(res))),
        r2=float(r2),
        sample_count=int(n),
        window=(float(s.min()), float(s.max())),
        slope_stderr=stderr,
        curvature=curv,
    )
