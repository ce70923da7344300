"""Pure numpy implementations of the hot loops; reference for the compiled twins."""

from __future__ import annotations

import math

import numpy as np

_SQRT2 = math.sqrt(2.0)
_CHUNK = 1024


def pairwise_sum(a) -> float:
    """Sum by a fixed binary tree: pair neighbours, pad odd levels with 0.0."""
    a = np.ascontiguousarray(a, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size & 1:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


def _psi(s: np.ndarray, xs: np.ndarray, ws: np.ndarray) -> np.ndarray:
    """Marginal of the unnormalized bump along a chord at abscissa ``s``."""
    c2 = 1.0 - s * s
    inner = np.exp(-1.0 / (c2[..., None] * (1.0 - xs * xs)))
    return (inner @ ws) * np.sqrt(c2)


def _moments(a, b, xs, ws):
    half = 0.5 * (b - a)
    s = half[:, None] * xs + (0.5 * (a + b))[:, None]
    p = _psi(s, xs, ws) * (half[:, None] * ws)
    return p.sum(axis=1), (p * s).sum(axis=1)


def bump_mass(xs, ws) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ws = np.asarray(ws, dtype=np.float64)
    return float(_psi(xs, xs, ws) @ ws)


def fh_core(delta, xs, ws):
    """``(g0, g1, g2)`` of the mollified max at scaled gaps ``delta``.

    ``xs, ws`` are Gauss-Legendre nodes and weights on [-1, 1], used on both
    axes.  The s-integral is split at ``s* = delta/sqrt(2)`` where the sign
    of ``delta - sqrt(2) s`` changes.
    """
    delta = np.ascontiguousarray(delta, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ws = np.ascontiguousarray(ws, dtype=np.float64)
    z = bump_mass(xs, ws)
    g0 = 0.5 * np.abs(delta)
    g1 = 0.5 * np.sign(delta)
    g2 = np.zeros_like(delta)
    sstar = delta / _SQRT2
    idx = np.flatnonzero(np.abs(sstar) < 1.0)
    for start in range(0, idx.size, _CHUNK):
        sel = idx[start : start + _CHUNK]
        d, ss = delta[sel], sstar[sel]
        m0l, m1l = _moments(np.full_like(ss, -1.0), ss, xs, ws)
        m0r, m1r = _moments(ss, np.ones_like(ss), xs, ws)
        g0[sel] = 0.5 * ((d * m0l - _SQRT2 * m1l) - (d * m0r - _SQRT2 * m1r)) / z
        g1[sel] = 0.5 * (m0l - m0r) / z
        g2[sel] = _psi(ss, xs, ws) / (_SQRT2 * z)
    return g0, g1, g2


def trilinear(stack, lo, inv_h, pts):
    """Trilinear interpolation of ``stack[f, i, j, k]`` at ``pts``; returns (nf, N)."""
    stack = np.asarray(stack, dtype=np.float64)
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 3)
    lo = np.asarray(lo, dtype=np.float64)
    inv_h = np.asarray(inv_h, dtype=np.float64)
    n = np.array(stack.shape[1:])
    f = (pts - lo) * inv_h
    i = np.clip(np.floor(f).astype(np.int64), 0, n - 2)
    a = f - i
    ix, iy, it = i[:, 0], i[:, 1], i[:, 2]
    ax, ay, at = a[:, 0], a[:, 1], a[:, 2]
    bx, by, bt = 1.0 - ax, 1.0 - ay, 1.0 - at
    out = np.zeros((stack.shape[0], pts.shape[0]))
    for dx, wx in ((0, bx), (1, ax)):
        for dy, wy in ((0, by), (1, ay)):
            for dt, wt in ((0, bt), (1, at)):
                out += (wx * wy * wt) * stack[:, ix + dx, iy + dy, it + dt]
    return out
