"""Steady-state detection for gating plant measurements.

Power readings taken while a compressor is still slewing toward a new
setpoint would poison the power-curve models, which assume each
observation belongs to one operating point.  The detector watches a
short rolling window of measured power and only declares steady state
when the least-squares trend over the window is statistically
indistinguishable from flat.

The test: fit power ~ intercept + slope * t over the window, form the
t-statistic of the slope against its standard error, and compare with
the two-sided Student-t critical value at the configured significance
level.  The residual std in the standard error is floored so that a
freakishly quiet window (or a noise-free simulation) cannot produce a
spuriously huge t-statistic out of numerical dust.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

__all__ = ["SsdConfig", "is_steady", "steady_all", "window_means"]


@dataclass(frozen=True)
class SsdConfig:
    """Detector tuning.

    window_s: window length in samples (one sample per second).
    alpha: two-sided significance level for the slope test.
    min_resid_std_kw: floor on the residual std in the t-statistic.
    """

    window_s: int = 30
    alpha: float = 0.05
    min_resid_std_kw: float = 0.5

    def validate(self) -> None:
        if self.window_s < 3:
            raise ValueError("window_s must be at least 3")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        if self.min_resid_std_kw <= 0.0:
            raise ValueError("min_resid_std_kw must be positive")


@lru_cache(maxsize=16)
def _window_constants(n: int, alpha: float):
    # centered time axis, its sum of squares, and the t critical value
    t = np.arange(n, dtype=float)
    t -= t.mean()
    sxx = float(t @ t)
    crit = float(stats.t.ppf(1.0 - alpha / 2.0, n - 2))
    return t, sxx, crit


def is_steady(series: np.ndarray, cfg: SsdConfig) -> bool:
    """True when the trailing window of one signal shows no trend.

    series must hold at least window_s samples; only the trailing
    window is inspected.
    """
    cfg.validate()
    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if series.size < cfg.window_s:
        raise ValueError(
            f"need at least {cfg.window_s} samples, got {series.size}"
        )
    return bool(steady_all(series[-cfg.window_s :][np.newaxis, :], cfg)[0])


def steady_all(windows: np.ndarray, cfg: SsdConfig) -> np.ndarray:
    """Vectorized slope test over rows of a (k, window_s) array.

    Returns a boolean vector, one entry per row.  This is the hot path
    for a plant with several compressors checked every second.
    """
    cfg.validate()
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2 or windows.shape[1] != cfg.window_s:
        raise ValueError(f"windows must have shape (k, {cfg.window_s})")
    n = cfg.window_s
    t, sxx, crit = _window_constants(n, cfg.alpha)
    y = windows - windows.mean(axis=1, keepdims=True)
    sxy = y @ t
    slope = sxy / sxx
    # residual sum of squares of the detrended window
    rss = np.einsum("ij,ij->i", y, y) - sxy**2 / sxx
    rss = np.maximum(rss, 0.0)
    resid_std = np.sqrt(rss / (n - 2))
    resid_std = np.maximum(resid_std, cfg.min_resid_std_kw)
    se = resid_std / np.sqrt(sxx)
    tstat = np.abs(slope) / se
    return tstat < crit


def window_means(windows: np.ndarray) -> np.ndarray:
    """Row means of measurement windows, the gated observation values."""
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2:
        raise ValueError("windows must be two-dimensional")
    return windows.mean(axis=1)
