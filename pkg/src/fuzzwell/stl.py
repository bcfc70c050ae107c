"""Seasonal-trend decomposition using loess.

Splits a daily series into trend + seasonal + remainder by the classical
iterated construction: cycle-subseries loess smoothing, a moving-average
low-pass to keep the seasonal centered, loess trend smoothing, and an
outer robustness loop that downweights outlier remainders with bisquare
weights. The remainder is defined by subtraction, so the reconstruction
identity holds exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._backend import loess as _loess_kernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Decomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.trend, self.seasonal, self.remainder):
            arr.flags.writeable = False


def loess_smooth(series: np.ndarray, window: int, degree: int = 1,
                 robustness_weights: np.ndarray | None = None,
                 extend: bool = False) -> np.ndarray:
    """Locally weighted polynomial smoothing of a uniformly spaced series.

    Parameters
    ----------
    series : 1-D array of values.
    window : odd positive neighbourhood size (number of nearest points);
        must be at least ``degree + 1``.
    degree : 0, 1 or 2.
    robustness_weights : optional per-point weights in [0, 1] multiplied
        into the tricube distance weights.
    extend : also evaluate at the positions just before and after the
        series (output length n + 2); used by the seasonal smoothing step.

    Windows truncate and recenter at the edges. A window whose combined
    weights all vanish is refit unweighted.
    """
    y = np.ascontiguousarray(series, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] == 0:
        raise ValueError("series must be a non-empty 1-D array")
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd positive integer, got {window}")
    if degree not in (0, 1, 2):
        raise ValueError(f"degree must be 0, 1 or 2, got {degree}")
    if window < degree + 1:
        raise ValueError(f"window {window} too short for degree {degree}")
    if robustness_weights is None:
        rw = np.ones(y.shape[0])
    else:
        rw = np.ascontiguousarray(robustness_weights, dtype=np.float64)
        if rw.shape != y.shape:
            raise ValueError("robustness_weights length must match series")
        if rw.min() < 0.0 or rw.max() > 1.0:
            raise ValueError("robustness_weights must lie in [0, 1]")
    return _loess_kernel(y, int(window), int(degree), rw, bool(extend))


def robustness_weights(remainder: np.ndarray) -> np.ndarray:
    """Bisquare weights of remainders: (1 - (|r| / (6 median|r|))^2)^2.

    Zero beyond 6 median|r|; all ones when the median is zero (nothing to
    downweight).
    """
    r = np.abs(np.asarray(remainder, dtype=np.float64))
    if r.size == 0:
        raise ValueError("remainder must be non-empty")
    scale = 6.0 * np.median(r)
    if scale <= 0.0:
        return np.ones(r.shape[0])
    u = r / scale
    w = (1.0 - u * u) ** 2
    w[u >= 1.0] = 0.0
    return w


def moving_average(series: np.ndarray, length: int) -> np.ndarray:
    """Simple moving average; output shrinks by length - 1."""
    y = np.asarray(series, dtype=np.float64)
    if length < 1 or y.shape[0] < length:
        raise ValueError(f"series of length {y.shape[0]} too short for "
                         f"moving average of length {length}")
    return np.convolve(y, np.ones(length), mode="valid") / length


def default_trend_window(period: int, seasonal_window: int) -> int:
    """Smallest odd window that keeps trend and seasonal passbands apart:
    next odd >= 1.5 * period / (1 - 1.5 / seasonal_window)."""
    raw = 1.5 * period / (1.0 - 1.5 / seasonal_window)
    w = int(np.ceil(raw))
    return w if w % 2 == 1 else w + 1


def _next_odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


def stl_decompose(series: np.ndarray, period: int,
                  inner_iters: int = 2, outer_iters: int = 1,
                  seasonal_window: int = 7,
                  trend_window: int | None = None) -> Decomposition:
    """Decompose ``series`` into trend + seasonal + remainder.

    ``series`` must hold at least two full periods. ``outer_iters`` counts
    the robustness reweighting passes; 0 disables robustness entirely.
    """
    y = np.ascontiguousarray(series, dtype=np.float64)
    n = y.shape[0]
    if period < 2:
        raise ValueError(f"period must be >= 2 for a seasonal split, got {period}")
    if n < 2 * period:
        raise ValueError(f"series of length {n} is shorter than two "
                         f"periods ({2 * period})")
    if inner_iters < 1:
        raise ValueError("inner_iters must be >= 1")
    if outer_iters < 0:
        raise ValueError("outer_iters must be >= 0")
    if trend_window is None:
        trend_window = default_trend_window(period, seasonal_window)
    lowpass_window = _next_odd(period)
    if seasonal_window < 3 or seasonal_window % 2 == 0:
        raise ValueError(f"seasonal_window must be an odd integer >= 3, "
                         f"got {seasonal_window}")
    if trend_window < 3 or trend_window % 2 == 0:
        raise ValueError(f"trend_window must be an odd integer >= 3, "
                         f"got {trend_window}")

    rho = np.ones(n)
    trend = np.zeros(n)
    seasonal = np.zeros(n)
    cycle = np.empty(n + 2 * period)

    for outer in range(outer_iters + 1):
        for _ in range(inner_iters):
            detrended = y - trend
            # Each cycle-subseries is smoothed and evaluated one period
            # beyond both ends, so the low-pass below lands back on n points.
            for k in range(period):
                cycle[k::period] = loess_smooth(
                    detrended[k::period], seasonal_window, 1,
                    rho[k::period], extend=True)
            lowpass = loess_smooth(
                moving_average(moving_average(moving_average(
                    cycle, period), period), 3),
                lowpass_window, 1)
            seasonal = cycle[period:period + n] - lowpass
            trend = loess_smooth(y - seasonal, trend_window, 1, rho)
        if outer < outer_iters:
            rho = robustness_weights(y - trend - seasonal)

    remainder = y - trend - seasonal
    return Decomposition(trend.copy(), seasonal.copy(), remainder)


def decompose_or_mean(series: np.ndarray, period: int,
                      **stl_kwargs) -> Decomposition:
    """stl_decompose, falling back to a flat mean trend on short series.

    Logs keep real datasets with only a few days; a constant trend is the
    only defensible summary there.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.shape[0] >= 2 * period:
        return stl_decompose(y, period, **stl_kwargs)
    logger.warning("series of length %d shorter than two periods (%d); "
                   "using its mean as the trend", y.shape[0], 2 * period)
    trend = np.full(y.shape[0], y.mean())
    seasonal = np.zeros(y.shape[0])
    return Decomposition(trend, seasonal, y - trend - seasonal)
