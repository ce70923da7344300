"""Gauge balls, boxes and annuli with membership, bounding boxes and sampling.

Ball-like regions are handled in local coordinates ``q`` with the global
point ``center ∘ q``.  Left translation has unit Jacobian, so integrals over
the local bounding box ``[-R, R]^2 x [-R^2, R^2]`` need no correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .group import ORIGIN, Point, compose, gauge

BALL_VOLUME = math.pi**2 / 2.0  # |B_1|, used only as a test-side reference


def _point(p) -> Point:
    return Point(*(float(v) for v in p))


class Region:
    """Common interface; see :class:`Ball`, :class:`Box`, :class:`Annulus`."""

    kind = "region"

    def local_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains_local(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_global(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, p) -> np.ndarray:
        raise NotImplementedError

    @property
    def inradius(self) -> float:
        raise NotImplementedError

    def global_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box containing the region in global coordinates."""
        lo, hi = self.local_box()
        corners = np.array(
            [[a, b, c] for a in (lo[0], hi[0]) for b in (lo[1], hi[1]) for c in (lo[2], hi[2])]
        )
        g = self.to_global(corners)
        return g.min(axis=0), g.max(axis=0)

    def sample_interior(self, n: int, seed: int = 0) -> np.ndarray:
        """``n`` scrambled-Sobol points of the region (global coordinates)."""
        if n <= 0:
            raise ValueError("sample count must be positive")
        lo, hi = self.local_box()
        sampler = qmc.Sobol(d=3, scramble=True, seed=seed)
        got: list[np.ndarray] = []
        total = 0
        while total < n:
            u = sampler.random(max(64, 1 << int(math.ceil(math.log2(2 * n)))))
            q = lo + u * (hi - lo)
            q = q[self.contains_local(q)]
            got.append(q)
            total += q.shape[0]
        return self.to_global(np.concatenate(got)[:n])

    def sample_boundary(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def sphere_points(center, radius: float, n: int) -> np.ndarray:
    """About ``n`` points on the gauge sphere ``d(., center) = radius``.

    Built on a (theta, level, t-sign) grid: ``x^2+y^2 = radius^2 w`` and
    ``t = ±radius^2 sqrt(1-w^2)`` for levels ``w`` in (0, 1].
    """
    n_theta = max(4, int(round(math.sqrt(n))))
    n_level = max(2, n // (2 * n_theta))
    theta = 2.0 * math.pi * (np.arange(n_theta) + 0.5) / n_theta
    w = (np.arange(n_level) + 1.0) / n_level
    th, ww = np.meshgrid(theta, w, indexing="ij")
    th, ww = th.ravel(), ww.ravel()
    s = radius * np.sqrt(ww)
    tz = radius**2 * np.sqrt(np.clip(1.0 - ww**2, 0.0, None))
    pts = []
    for sign in (1.0, -1.0):
        pts.append(np.stack([s * np.cos(th), s * np.sin(th), sign * tz], axis=-1))
    local = np.concatenate(pts)
    # levels with w = 1 produce duplicate t = 0 points; keep one copy
    local = np.unique(np.round(local, 15), axis=0)
    return np.asarray(compose(center, local)).reshape(-1, 3)


@dataclass(frozen=True)
class Ball(Region):
    center: Point
    radius: float
    kind = "ball"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", _point(self.center))

    def local_box(self):
        r = self.radius
        return np.array([-r, -r, -r * r]), np.array([r, r, r * r])

    def contains_local(self, q):
        return gauge(q) < self.radius

    def to_global(self, q):
        return np.asarray(compose(self.center, np.asarray(q, dtype=float))).reshape(np.shape(q))

    def contains(self, p):
        return gauge(compose(tuple(-c for c in self.center), np.asarray(p, dtype=float))) < self.radius

    @property
    def inradius(self):
        return self.radius

    def sample_boundary(self, n):
        return sphere_points(self.center, self.radius, n)

    def to_dict(self):
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Annulus(Region):
    """``{inner <= d(., center) < outer}``."""

    center: Point
    inner: float
    outer: float
    kind = "annulus"

    def __post_init__(self):
        if not 0.0 < self.inner < self.outer:
            raise ValueError("annulus needs 0 < inner < outer")
        object.__setattr__(self, "center", _point(self.center))

    def local_box(self):
        r = self.outer
        return np.array([-r, -r, -r * r]), np.array([r, r, r * r])

    def contains_local(self, q):
        g = gauge(q)
        return (g >= self.inner) & (g < self.outer)

    def to_global(self, q):
        return np.asarray(compose(self.center, np.asarray(q, dtype=float))).reshape(np.shape(q))

    def contains(self, p):
        return self.contains_local(compose(tuple(-c for c in self.center), np.asarray(p, dtype=float)))

    @property
    def inradius(self):
        return 0.5 * (self.outer - self.inner)

    def sample_boundary(self, n):
        k = max(1, n // 2)
        return np.concatenate(
            [sphere_points(self.center, self.outer, k), sphere_points(self.center, self.inner, k)]
        )

    def to_dict(self):
        return {"kind": "annulus", "center": list(self.center), "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class Box(Region):
    lo: tuple
    hi: tuple
    kind = "box"

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3 or not all(b > a for a, b in zip(lo, hi)):
            raise ValueError("box needs positive extents on all three axes")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def center(self) -> Point:
        return Point(*(0.5 * (a + b) for a, b in zip(self.lo, self.hi)))

    def local_box(self):
        return np.array(self.lo), np.array(self.hi)

    def contains_local(self, q):
        q = np.asarray(q, dtype=float)
        return np.all((q >= self.lo) & (q < self.hi), axis=-1)

    def to_global(self, q):
        return np.asarray(q, dtype=float)

    def contains(self, p):
        return self.contains_local(p)

    @property
    def inradius(self):
        return 0.5 * min(b - a for a, b in zip(self.lo, self.hi))

    @property
    def volume(self):
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    def sample_boundary(self, n):
        per = max(2, int(round(math.sqrt(n / 6.0))))
        g = (np.arange(per) + 0.5) / per
        a, b = np.meshgrid(g, g, indexing="ij")
        a, b = a.ravel(), b.ravel()
        lo, hi = np.array(self.lo), np.array(self.hi)
        faces = []
        for axis in range(3):
            others = [i for i in range(3) if i != axis]
            for side in (lo[axis], hi[axis]):
                f = np.empty((a.size, 3))
                f[:, axis] = side
                f[:, others[0]] = lo[others[0]] + a * (hi[others[0]] - lo[others[0]])
                f[:, others[1]] = lo[others[1]] + b * (hi[others[1]] - lo[others[1]])
                faces.append(f)
        return np.concatenate(faces)

    def to_dict(self):
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}


def ball(radius: float, center=ORIGIN) -> Ball:
    return Ball(_point(center), float(radius))


def parse_region(text: str) -> Region:
    """``ball:R[:x,y,t]``, ``annulus:r_in,r_out[:x,y,t]`` or ``box:x0,y0,t0,x1,y1,t1``."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "ball" and parts:
            center = tuple(map(float, parts[1].split(","))) if len(parts) > 1 else ORIGIN
            return Ball(center, float(parts[0]))
        if kind == "annulus" and parts:
            r_in, r_out = map(float, parts[0].split(","))
            center = tuple(map(float, parts[1].split(","))) if len(parts) > 1 else ORIGIN
            return Annulus(center, r_in, r_out)
        if kind == "box" and parts:
            v = list(map(float, parts[0].split(",")))
            if len(v) == 6:
                return Box(tuple(v[:3]), tuple(v[3:]))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad region {text!r}: {exc}") from None
    raise ValueError(f"bad region {text!r}; expected ball:R, annulus:r,R or box:x0,y0,t0,x1,y1,t1")
