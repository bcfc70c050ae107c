"""NumPy implementations of the hot kernels.

Selected by ``fuzzwell._backend`` when the compiled extension is not
importable (or when ``FUZZWELL_PURE_PYTHON`` is set). Must stay
numerically interchangeable with ``_kernels.pyx``: same branch structure,
same per-element arithmetic, same fallback rules.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "numpy"

# Shape codes shared with the compiled kernel.
SHAPE_TRI = 0
SHAPE_TRAP = 1
SHAPE_CRISP = 2


def mf_grid(kind: int, p0: float, p1: float, p2: float, p3: float,
            xs: np.ndarray) -> np.ndarray:
    """Evaluate one piecewise-linear membership shape on a sample grid."""
    y = np.zeros(xs.shape[0], dtype=np.float64)
    if kind == SHAPE_TRI:
        a, b, c = p0, p1, p2
        if b > a:
            m = (xs >= a) & (xs <= b)
            y[m] = (xs[m] - a) / (b - a)
        else:
            y[xs == a] = 1.0
        if c > b:
            m = (xs > b) & (xs <= c)
            y[m] = (c - xs[m]) / (c - b)
    elif kind == SHAPE_TRAP:
        a, b, c, d = p0, p1, p2, p3
        if b > a:
            m = (xs >= a) & (xs < b)
            y[m] = (xs[m] - a) / (b - a)
        m = (xs >= b) & (xs <= c)
        y[m] = 1.0
        if d > c:
            m = (xs > c) & (xs <= d)
            y[m] = (d - xs[m]) / (d - c)
    elif kind == SHAPE_CRISP:
        y[(xs >= p0) & (xs <= p1)] = 1.0
    else:
        raise ValueError(f"unknown shape kind {kind}")
    return y


def clip_accumulate(acc: np.ndarray, ys: np.ndarray, alpha: float) -> None:
    """In place: acc = max(acc, min(ys, alpha))."""
    np.maximum(acc, np.minimum(ys, alpha), out=acc)


def centroid_moments(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Return (sum of x*y, sum of y) over the sample grid."""
    return float(np.dot(xs, ys)), float(np.sum(ys))


# Relative determinant thresholds below which a local fit is treated as
# singular and the degree reduced.
_SING1 = 1e-12
_SING2 = 1e-12


def loess(y: np.ndarray, window: int, degree: int,
          rw: np.ndarray, extend: bool) -> np.ndarray:
    """Locally weighted polynomial smoothing on a uniform grid.

    At each evaluation point the ``window`` nearest neighbours are fit
    with a degree-``degree`` polynomial under tricube distance weights
    times the robustness weights ``rw``. Windows truncate and recenter at
    the series edges. If all combined weights in a window vanish, the fit
    falls back to an unweighted one over the same window; a singular
    design falls back to a lower degree.

    With ``extend`` the curve is also evaluated at the two positions just
    outside the series (indices -1 and n), and the output has n+2 entries.
    """
    y = np.asarray(y, dtype=np.float64)
    rw = np.asarray(rw, dtype=np.float64)
    n = y.shape[0]
    weff = min(window, n)

    if extend:
        pos = np.arange(-1, n + 1, dtype=np.float64)
    else:
        pos = np.arange(n, dtype=np.float64)

    s = np.clip(np.floor(pos).astype(np.int64) - (weff - 1) // 2, 0, n - weff)
    idx = s[:, None] + np.arange(weff)[None, :]
    t = idx.astype(np.float64) - pos[:, None]

    h = np.maximum(pos - s, (s + weff - 1) - pos)
    if window > n:
        h = h + (window - n) / 2.0
    hs = np.where(h > 0.0, h, 1.0)

    r = np.abs(t)
    w = np.where(
        r <= 0.999 * h[:, None],
        np.where(r <= 0.001 * h[:, None], 1.0, (1.0 - (r / hs[:, None]) ** 3) ** 3),
        0.0,
    )
    w = w * rw[idx]

    # Degenerate windows (all weights zero) refit unweighted.
    dead = w.sum(axis=1) <= 0.0
    if dead.any():
        w[dead] = 1.0

    yw = y[idx]
    m0 = w.sum(axis=1)
    b0 = (w * yw).sum(axis=1)
    out = b0 / m0
    if degree >= 1:
        m1 = (w * t).sum(axis=1)
        m2 = (w * t * t).sum(axis=1)
        b1 = (w * t * yw).sum(axis=1)
        det1 = m0 * m2 - m1 * m1
        ok1 = det1 > _SING1 * m0 * m2
        safe1 = np.where(ok1, det1, 1.0)
        out = np.where(ok1, (m2 * b0 - m1 * b1) / safe1, out)
    if degree >= 2:
        t2 = t * t
        m3 = (w * t2 * t).sum(axis=1)
        m4 = (w * t2 * t2).sum(axis=1)
        b2 = (w * t2 * yw).sum(axis=1)
        det2 = (m0 * (m2 * m4 - m3 * m3)
                - m1 * (m1 * m4 - m3 * m2)
                + m2 * (m1 * m3 - m2 * m2))
        num = (b0 * (m2 * m4 - m3 * m3)
               - m1 * (b1 * m4 - m3 * b2)
               + m2 * (b1 * m3 - m2 * b2))
        ok2 = det2 > _SING2 * m0 * m2 * m4
        safe2 = np.where(ok2, det2, 1.0)
        out = np.where(ok2, num / safe2, out)
    return out
