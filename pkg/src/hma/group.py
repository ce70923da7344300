"""Group law, gauge and horizontal geometry of the first Heisenberg group.

Points are triples ``(x, y, t)``.  Every function accepts either a single
point (anything of length 3) or an array of shape ``(..., 3)``; single points
come back as :class:`Point`, arrays come back as arrays.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

PLANE_TOL = 1e-10
BISECTION_RTOL = 1e-12


class Point(NamedTuple):
    x: float
    y: float
    t: float


ORIGIN = Point(0.0, 0.0, 0.0)


class GaugeBall(NamedTuple):
    center: Point
    radius: float

    def contains(self, p) -> np.ndarray | bool:
        return distance(p, self.center) < self.radius


class HorizontalPlane(NamedTuple):
    base: Point

    def residual(self, p):
        return plane_residual(self.base, p)

    def contains(self, p, tol: float = PLANE_TOL):
        return in_plane(self.base, p, tol)


def _arr(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def _out(a: np.ndarray):
    if a.ndim == 1:
        return Point(float(a[0]), float(a[1]), float(a[2]))
    return a


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def compose(a, b):
    """Group product ``a ∘ b``."""
    a, b = _arr(a), _arr(b)
    ax, ay, at = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bt = b[..., 0], b[..., 1], b[..., 2]
    out = np.stack(
        np.broadcast_arrays(ax + bx, ay + by, at + bt + 2.0 * (bx * ay - by * ax)),
        axis=-1,
    )
    return _out(out)


def inverse(a):
    return _out(-_arr(a))


def dilate(lam: float, a):
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    a = _arr(a)
    return _out(a * np.array([lam, lam, lam * lam]))


def gauge(a):
    a = _arr(a)
    w = a[..., 0] ** 2 + a[..., 1] ** 2
    return _scalar(np.sqrt(np.sqrt(w * w + a[..., 2] ** 2)))


def distance(a, b):
    """Left-invariant gauge distance ``rho(b^{-1} ∘ a)``; symmetric."""
    return gauge(compose(inverse(b), a))


def plane_residual(base, p):
    """``t - t0 - 2(x y0 - y x0)``; zero iff ``p`` lies in the horizontal plane at ``base``."""
    b, p = _arr(base), _arr(p)
    return _scalar(p[..., 2] - b[..., 2] - 2.0 * (p[..., 0] * b[..., 1] - p[..., 1] * b[..., 0]))


def in_plane(base, p, tol: float = PLANE_TOL):
    b = _arr(base)
    return np.abs(plane_residual(base, p)) <= tol * (1.0 + np.abs(b[..., 2]))


def group_segment(base, target, lam):
    """``base ∘ δ_lam(base^{-1} ∘ target)``; lam=0 gives base, lam=1 gives target."""
    rel = _arr(compose(inverse(base), target))
    lam = np.asarray(lam, dtype=float)[..., None]
    scaled = rel * np.concatenate(np.broadcast_arrays(lam, lam, lam * lam), axis=-1)
    return compose(base, scaled)


def exp_flow(direction: str, sigma: float, a):
    """Flow of the left-invariant field X (or Y) for time ``sigma`` starting at ``a``."""
    a = _arr(a)
    x, y, t = a[..., 0], a[..., 1], a[..., 2]
    if direction == "X":
        out = np.stack(np.broadcast_arrays(x + sigma, y, t + 2.0 * sigma * y), axis=-1)
    elif direction == "Y":
        out = np.stack(np.broadcast_arrays(x, y + sigma, t - 2.0 * sigma * x), axis=-1)
    else:
        raise ValueError(f"direction must be 'X' or 'Y', got {direction!r}")
    return _out(out)


def lambda_to_boundary(base, target, ball: GaugeBall) -> float:
    """Dilation factor ``lam > 1`` pushing ``target`` along the group segment to ``∂ball``.

    The segment starting at ``base`` through ``target`` (which must lie in the
    horizontal plane of ``base``) is continued until it meets the gauge
    sphere.  Solved by bisection on ``d(segment(lam), center) - R``.
    """
    base = Point(*map(float, base))
    target = Point(*map(float, target))
    if base == target:
        raise ValueError("base and target coincide: segment has no direction")
    if not in_plane(base, target):
        raise ValueError(
            f"target is not in the horizontal plane of base "
            f"(residual {plane_residual(base, target):.3e})"
        )
    center, radius = Point(*ball.center), float(ball.radius)

    def f(lam: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            v = distance(group_segment(base, target, lam), center) - radius
        return v if math.isfinite(v) else math.inf

    if f(1.0) >= 0.0:
        raise ValueError("target is not inside the ball")
    # the triangle inequality keeps the segment inside up to (R - d(base, c)) / d(base, target)
    lo = 1.0
    step = distance(base, target)
    if step > 0.0:
        guess = 0.999 * (radius - distance(base, center)) / step
        if guess > lo and f(guess) < 0.0:
            lo = guess
    hi = 2.0 * lo
    while f(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ArithmeticError("segment never leaves the ball")
    while hi - lo > BISECTION_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gauge_sphere(radius: float, n_theta: int, n_psi: int, center=ORIGIN) -> np.ndarray:
    """Points on ``{d(., center) = radius}`` on a (theta, psi) grid.

    Parametrized by ``(x, y) = radius*sqrt(cos psi)*(cos theta, sin theta)``,
    ``t = radius**2 * sin psi`` with psi in [-pi/2, pi/2].
    """
    theta = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
    psi = -0.5 * math.pi + math.pi * np.arange(n_psi) / max(n_psi - 1, 1)
    th, ps = np.meshgrid(theta, psi, indexing="ij")
    s = radius * np.sqrt(np.clip(np.cos(ps), 0.0, None))
    local = np.stack([s * np.cos(th), s * np.sin(th), radius**2 * np.sin(ps)], axis=-1)
    return np.asarray(compose(center, local.reshape(-1, 3)))
