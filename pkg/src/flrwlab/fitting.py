"""Decay series and log-log rate fitting."""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .errors import FitError


@dataclass
class FitResult:
    exponent: float
    residual: float          # max |deviation| of the fit in log space
    window: tuple
    n_points: int
    intercept: float = 0.0


@dataclass
class DecaySeries:
    """Time-indexed norms of a run: columns keyed 'l2', 'linf', 'lq_<q>'."""

    t: np.ndarray
    columns: dict
    fits: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        if np.any(np.diff(self.t) <= 0):
            raise FitError("series times must be strictly increasing")
        for key, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.t.shape:
                raise FitError(f"column {key} length mismatch")
            if np.any(~np.isfinite(col)) or np.any(col < 0):
                raise FitError(f"column {key} has non-finite or negative entries")
            self.columns[key] = col

    def column(self, key: str) -> np.ndarray:
        return self.columns[key]


def fit_decay_exponent(t, values, window) -> FitResult:
    """Least-squares slope of log(values) against log(1+t) over a window.

    The residual is the maximum absolute deviation from the fitted line in
    log space, which a pure power law drives to rounding level.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = float(window[0]), float(window[1])
    mask = (t >= lo) & (t <= hi)
    if int(np.count_nonzero(mask)) < 8:
        raise FitError(f"fit window [{lo}, {hi}] holds fewer than 8 samples")
    ts, ys = t[mask], values[mask]
    if np.any(ys <= 0) or np.any(~np.isfinite(ys)):
        raise FitError("fit window contains non-positive or non-finite norms")
    x = np.log1p(ts)
    y = np.log(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return FitResult(exponent=float(slope), residual=resid, window=(lo, hi),
                     n_points=int(ts.size), intercept=float(intercept))


def detect_log_factor(t, values, window, min_range: float = 5e-3) -> bool:
    """Heuristic flag for a multiplicative logarithmic factor.

    A power law times log(e+t) leaves a concave (single-hump) residual
    after the linear log-log fit; a pure power law leaves rounding noise
    and an oscillating norm leaves many sign changes.
    """
    fit = fit_decay_exponent(t, values, window)
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (t >= fit.window[0]) & (t <= fit.window[1])
    x = np.log1p(t[mask])
    resid = np.log(values[mask]) - (fit.exponent * x + fit.intercept)
    if float(np.ptp(resid)) < min_range:
        return False
    d = np.diff(resid)
    sig = np.sign(d[np.abs(d) > 1e-12])
    if sig.size == 0:
        return False
    changes = int(np.count_nonzero(np.diff(sig) != 0))
    return changes <= 1


def fit_series(series: DecaySeries, key: str, window) -> FitResult:
    fit = fit_decay_exponent(series.t, series.column(key), window)
    series.fits[key] = fit
    return fit
