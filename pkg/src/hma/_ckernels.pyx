# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the loops in ``_pykernels``; same formulas, same summation order."""

from libc.math cimport exp, sqrt, floor, fabs

import numpy as np

cdef double SQRT2 = sqrt(2.0)


def pairwise_sum(a):
    arr = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef Py_ssize_t n = arr.shape[0]
    if n == 0:
        return 0.0
    buf = arr.copy()
    cdef double[::1] b = buf
    cdef Py_ssize_t i, m
    with nogil:
        while n > 1:
            m = n // 2
            for i in range(m):
                b[i] = b[2 * i] + b[2 * i + 1]
            if n & 1:
                b[m] = b[n - 1] + 0.0
                m += 1
            n = m
    return b[0]


cdef inline double _psi(double s, const double[::1] xs, const double[::1] ws) noexcept nogil:
    cdef double c2 = 1.0 - s * s
    cdef double acc = 0.0
    cdef Py_ssize_t k
    if c2 <= 0.0:
        return 0.0
    for k in range(xs.shape[0]):
        acc += ws[k] * exp(-1.0 / (c2 * (1.0 - xs[k] * xs[k])))
    return acc * sqrt(c2)


cdef inline void _moments(double a, double b, const double[::1] xs, const double[::1] ws,
                          double* m0, double* m1) noexcept nogil:
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double s, p
    cdef Py_ssize_t k
    m0[0] = 0.0
    m1[0] = 0.0
    for k in range(xs.shape[0]):
        s = half * xs[k] + mid
        p = _psi(s, xs, ws) * (half * ws[k])
        m0[0] += p
        m1[0] += p * s


def bump_mass(xs_in, ws_in):
    cdef const double[::1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef const double[::1] ws = np.ascontiguousarray(ws_in, dtype=np.float64)
    cdef double z = 0.0
    cdef Py_ssize_t k
    for k in range(xs.shape[0]):
        z += _psi(xs[k], xs, ws) * ws[k]
    return z


def fh_core(delta_in, xs_in, ws_in):
    cdef const double[::1] delta = np.ascontiguousarray(delta_in, dtype=np.float64).ravel()
    cdef const double[::1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef const double[::1] ws = np.ascontiguousarray(ws_in, dtype=np.float64)
    cdef Py_ssize_t n = delta.shape[0], i
    g0a = np.empty(n)
    g1a = np.empty(n)
    g2a = np.empty(n)
    cdef double[::1] g0 = g0a, g1 = g1a, g2 = g2a
    cdef double z = bump_mass(xs_in, ws_in)
    cdef double d, ss, m0l, m1l, m0r, m1r
    with nogil:
        for i in range(n):
            d = delta[i]
            ss = d / SQRT2
            if fabs(ss) < 1.0:
                _moments(-1.0, ss, xs, ws, &m0l, &m1l)
                _moments(ss, 1.0, xs, ws, &m0r, &m1r)
                g0[i] = 0.5 * ((d * m0l - SQRT2 * m1l) - (d * m0r - SQRT2 * m1r)) / z
                g1[i] = 0.5 * (m0l - m0r) / z
                g2[i] = _psi(ss, xs, ws) / (SQRT2 * z)
            else:
                g0[i] = 0.5 * fabs(d)
                g1[i] = 0.5 if d > 0 else -0.5
                g2[i] = 0.0
    return g0a, g1a, g2a


def trilinear(stack_in, lo_in, inv_h_in, pts_in):
    cdef const double[:, :, :, ::1] stack = np.ascontiguousarray(stack_in, dtype=np.float64)
    cdef const double[::1] lo = np.ascontiguousarray(lo_in, dtype=np.float64)
    cdef const double[::1] inv_h = np.ascontiguousarray(inv_h_in, dtype=np.float64)
    cdef const double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64).reshape(-1, 3)
    cdef Py_ssize_t nf = stack.shape[0], npts = pts.shape[0]
    cdef Py_ssize_t nx = stack.shape[1], ny = stack.shape[2], nt = stack.shape[3]
    outa = np.empty((nf, npts))
    cdef double[:, ::1] out = outa
    cdef Py_ssize_t p, f, ix, iy, it
    cdef double fx, fy, ft, ax, ay, at, bx, by, bt
    cdef double w000, w001, w010, w011, w100, w101, w110, w111, acc
    with nogil:
        for p in range(npts):
            fx = (pts[p, 0] - lo[0]) * inv_h[0]
            fy = (pts[p, 1] - lo[1]) * inv_h[1]
            ft = (pts[p, 2] - lo[2]) * inv_h[2]
            ix = <Py_ssize_t>floor(fx)
            iy = <Py_ssize_t>floor(fy)
            it = <Py_ssize_t>floor(ft)
            ix = 0 if ix < 0 else (nx - 2 if ix > nx - 2 else ix)
            iy = 0 if iy < 0 else (ny - 2 if iy > ny - 2 else iy)
            it = 0 if it < 0 else (nt - 2 if it > nt - 2 else it)
            ax = fx - ix
            ay = fy - iy
            at = ft - it
            bx = 1.0 - ax
            by = 1.0 - ay
            bt = 1.0 - at
            w000 = bx * by * bt
            w001 = bx * by * at
            w010 = bx * ay * bt
            w011 = bx * ay * at
            w100 = ax * by * bt
            w101 = ax * by * at
            w110 = ax * ay * bt
            w111 = ax * ay * at
            for f in range(nf):
                acc = 0.0
                acc += w000 * stack[f, ix, iy, it]
                acc += w001 * stack[f, ix, iy, it + 1]
                acc += w010 * stack[f, ix, iy + 1, it]
                acc += w011 * stack[f, ix, iy + 1, it + 1]
                acc += w100 * stack[f, ix + 1, iy, it]
                acc += w101 * stack[f, ix + 1, iy, it + 1]
                acc += w110 * stack[f, ix + 1, iy + 1, it]
                acc += w111 * stack[f, ix + 1, iy + 1, it + 1]
                out[f, p] = acc
    return outa
