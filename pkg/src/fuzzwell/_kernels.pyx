# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Numerically interchangeable with ``_kernels_py``: same branch structure,
same per-element arithmetic, same fallback rules. Kept dependency-light
on purpose; everything here is plain C loops over float64 buffers.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "compiled"

SHAPE_TRI = 0
SHAPE_TRAP = 1
SHAPE_CRISP = 2

cdef double _SING1 = 1e-12
cdef double _SING2 = 1e-12


def mf_grid(int kind, double p0, double p1, double p2, double p3,
            const double[::1] xs):
    """Evaluate one piecewise-linear membership shape on a sample grid."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i
    cdef double x
    if kind == 0:  # triangular(p0, p1, p2)
        for i in range(n):
            x = xs[i]
            if x < p0 or x > p2:
                continue
            if x <= p1:
                y[i] = (x - p0) / (p1 - p0) if p1 > p0 else 1.0
            elif p2 > p1:
                y[i] = (p2 - x) / (p2 - p1)
    elif kind == 1:  # trapezoidal(p0, p1, p2, p3)
        for i in range(n):
            x = xs[i]
            if x < p0 or x > p3:
                continue
            if x < p1:
                y[i] = (x - p0) / (p1 - p0)
            elif x <= p2:
                y[i] = 1.0
            elif p3 > p2:
                y[i] = (p3 - x) / (p3 - p2)
    elif kind == 2:  # crisp(p0, p1)
        for i in range(n):
            x = xs[i]
            if p0 <= x <= p1:
                y[i] = 1.0
    else:
        raise ValueError(f"unknown shape kind {kind}")
    return out


def clip_accumulate(double[::1] acc, const double[::1] ys, double alpha):
    """In place: acc = max(acc, min(ys, alpha))."""
    cdef Py_ssize_t i, n = acc.shape[0]
    cdef double v
    for i in range(n):
        v = ys[i]
        if v > alpha:
            v = alpha
        if v > acc[i]:
            acc[i] = v


def centroid_moments(const double[::1] xs, const double[::1] ys):
    """Return (sum of x*y, sum of y) over the sample grid."""
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef double m1 = 0.0, m0 = 0.0
    for i in range(n):
        m1 += xs[i] * ys[i]
        m0 += ys[i]
    return m1, m0


def loess(const double[::1] y, int window, int degree,
          const double[::1] rw, bint extend):
    """Locally weighted polynomial smoothing on a uniform grid.

    Same contract as the NumPy fallback: tricube times robustness
    weights over the ``window`` nearest neighbours, unweighted refit when
    all weights vanish, degree reduction on singular designs, optional
    evaluation at the two positions just outside the series.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef int weff = window if window < n else <int>n
    cdef Py_ssize_t npos = n + 2 if extend else n
    cdef cnp.ndarray[cnp.float64_t, ndim=1] result = np.empty(npos, dtype=np.float64)
    cdef double[::1] out = result
    cdef Py_ssize_t k, j
    cdef Py_ssize_t s
    cdef double pos, h, hs, t, r, wj, u
    cdef double m0, m1, m2, m3, m4, b0, b1, b2
    cdef double det1, det2, num, t2
    cdef double fitted
    cdef bint dead

    for k in range(npos):
        pos = <double>(k - 1) if extend else <double>k
        s = <Py_ssize_t>(k - 1 if extend else k) - (weff - 1) // 2
        if s < 0:
            s = 0
        elif s > n - weff:
            s = n - weff
        h = pos - s
        if (s + weff - 1) - pos > h:
            h = (s + weff - 1) - pos
        if window > n:
            h = h + (window - n) / 2.0
        hs = h if h > 0.0 else 1.0

        dead = True
        m0 = m1 = m2 = m3 = m4 = 0.0
        b0 = b1 = b2 = 0.0
        for j in range(weff):
            t = (s + j) - pos
            r = t if t >= 0.0 else -t
            if r <= 0.999 * h:
                if r <= 0.001 * h:
                    wj = 1.0
                else:
                    u = r / hs
                    wj = (1.0 - u * u * u)
                    wj = wj * wj * wj
            else:
                wj = 0.0
            wj = wj * rw[s + j]
            if wj > 0.0:
                dead = False
            m0 += wj
            m1 += wj * t
            m2 += wj * t * t
            m3 += wj * t * t * t
            m4 += wj * t * t * t * t
            b0 += wj * y[s + j]
            b1 += wj * t * y[s + j]
            b2 += wj * t * t * y[s + j]
        if dead:
            m0 = m1 = m2 = m3 = m4 = 0.0
            b0 = b1 = b2 = 0.0
            for j in range(weff):
                t = (s + j) - pos
                m0 += 1.0
                m1 += t
                m2 += t * t
                m3 += t * t * t
                m4 += t * t * t * t
                b0 += y[s + j]
                b1 += t * y[s + j]
                b2 += t * t * y[s + j]

        fitted = b0 / m0
        if degree >= 1:
            det1 = m0 * m2 - m1 * m1
            if det1 > _SING1 * m0 * m2:
                fitted = (m2 * b0 - m1 * b1) / det1
        if degree >= 2:
            t2 = m2 * m4 - m3 * m3
            det2 = m0 * t2 - m1 * (m1 * m4 - m3 * m2) + m2 * (m1 * m3 - m2 * m2)
            if det2 > _SING2 * m0 * m2 * m4:
                num = b0 * t2 - m1 * (b1 * m4 - m3 * b2) + m2 * (b1 * m3 - m2 * b2)
                fitted = num / det2
        out[k] = fitted
    return result
