"""H-convexity checks, convex composition, the mollified max and the Lipschitz estimate."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate as sp_integrate

from . import _kernels
from .group import Point, compose, distance, group_segment
from .jets import DomainError, Jet, ScalarField, compose2, horizontal_hessian
from .regions import Ball, Region

DEFAULT_TOL = 1e-8
GL_ORDER = 32
LIPSCHITZ_SLACK = 1.1


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of a convexity scan.

    ``method`` is ``"psd"`` or ``"segments"``; the metric belonging to the
    other method is reported as 0.
    """

    method: str
    min_eigenvalue_seen: float
    worst_point: Point
    segment_violation: float
    verdict: str
    samples: int

    @property
    def convex(self) -> bool:
        return self.verdict == "convex"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_point"] = list(self.worst_point)
        return d


def _to_point(p) -> Point:
    return Point(*(float(v) for v in p))


def check_psd(u: ScalarField, region: Region, samples: int = 512, tol: float = DEFAULT_TOL,
              seed: int = 0) -> ConvexityReport:
    """Smallest eigenvalue of ``H(u)`` over a low-discrepancy sample of ``region``.

    Points outside the field's domain are skipped; if none remain the verdict
    is ``inconclusive``.
    """
    pts = region.sample_interior(samples, seed=seed)
    pts = pts[u.in_domain(pts)]
    if pts.shape[0] == 0:
        return ConvexityReport("psd", math.nan, Point(math.nan, math.nan, math.nan), 0.0, "inconclusive", 0)
    lam = np.asarray(horizontal_hessian(u, pts).min_eigenvalue)
    k = int(np.argmin(lam))
    m = float(lam[k])
    verdict = "convex" if m >= -tol else "not_convex"
    return ConvexityReport("psd", m, _to_point(pts[k]), 0.0, verdict, int(pts.shape[0]))


def check_group_segments(u: ScalarField, region: Region, samples: int = 256, tol: float = DEFAULT_TOL,
                         seed: int = 0, n_lambda: int = 11, reach: float = 0.5) -> ConvexityReport:
    """Sampled check of ``u(segment(lam)) <= (1 - lam) u(xi0) + lam u(xi)`` on ``[0, 1]``.

    ``xi = xi0 ∘ (a, b, 0)`` with ``(a, b)`` uniform in a disk of radius
    ``reach * inradius``; pairs whose segment leaves the region are dropped.
    """
    rng = np.random.default_rng(seed)
    base = region.sample_interior(samples, seed=seed)
    rad = reach * region.inradius * np.sqrt(rng.random(samples))
    ang = 2.0 * math.pi * rng.random(samples)
    step = np.stack([rad * np.cos(ang), rad * np.sin(ang), np.zeros(samples)], axis=-1)
    target = np.asarray(compose(base, step))
    lams = np.linspace(0.0, 1.0, n_lambda)
    seg = np.stack([np.asarray(group_segment(base, target, lam)) for lam in lams], axis=1)
    keep = np.all(region.contains(seg.reshape(-1, 3)).reshape(samples, n_lambda), axis=1)
    if not np.any(keep):
        return ConvexityReport("segments", 0.0, Point(math.nan, math.nan, math.nan), math.nan, "inconclusive", 0)
    seg = seg[keep]
    vals = np.asarray(u(seg.reshape(-1, 3))).reshape(seg.shape[:2])
    chord = (1.0 - lams) * vals[:, :1] + lams * vals[:, -1:]
    excess = vals - chord
    i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = float(excess[i, j])
    verdict = "convex" if worst <= tol else "not_convex"
    return ConvexityReport("segments", 0.0, _to_point(seg[i, j]), worst, verdict, int(seg.shape[0]))


# bivariate convex functions -------------------------------------------------------


@dataclass(frozen=True)
class Bivariate:
    """Convex ``f(a, b)``, nondecreasing in each argument.

    ``jet`` returns ``(f, f_a, f_b, f_aa, f_ab, f_bb)``; when it is ``None`` the
    function is only continuous and composites carry no derivatives.
    """

    value: Callable
    jet: Optional[Callable] = None
    name: str = "f"


def sum_function() -> Bivariate:
    def jet(a, b):
        z, o = np.zeros_like(a), np.ones_like(a)
        return a + b, o, o, z, z, z

    return Bivariate(lambda a, b: a + b, jet, "sum")


def max_function() -> Bivariate:
    return Bivariate(np.maximum, None, "max")


def convex_compose(f: Bivariate, u1: ScalarField, u2: ScalarField) -> ScalarField:
    """The field ``f(u1, u2)``; C^2 when ``f``, ``u1`` and ``u2`` are."""
    v1, v2 = u1._value, u2._value
    jet = None
    if f.jet is not None and u1.smooth and u2.smooth:
        def jet(p):
            a, b = u1._jet(p), u2._jet(p)
            return compose2(a, b, *f.jet(a.value, b.value))

    def domain(p):
        ok = np.ones(p.shape[0], dtype=bool)
        for d in (u1._domain, u2._domain):
            if d is not None:
                ok &= d(p)
        return ok

    has_domain = u1._domain is not None or u2._domain is not None
    return ScalarField(lambda p: f.value(v1(p), v2(p)), jet, domain if has_domain else None,
                       name=f"{f.name}({u1.name},{u2.name})")


# mollified max ----------------------------------------------------------------------


@lru_cache(maxsize=4)
def _gauss_legendre(n: int):
    xs, ws = np.polynomial.legendre.leggauss(n)
    return xs, ws


def mollified_max_parts(x1, x2, h: float, order: int = GL_ORDER):
    """``(f, f_1, f_2, f_11, f_12, f_22)`` of the mollified max.

    With ``delta = (x1 - x2)/h`` the function is ``(x1+x2)/2 + h g0(delta)``;
    it equals ``max(x1, x2)`` exactly once ``|delta| >= sqrt(2)``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x1, x2 = np.broadcast_arrays(x1, x2)
    xs, ws = _gauss_legendre(order)
    delta = ((x1 - x2) / h).ravel()
    g0, g1, g2 = (np.asarray(g).reshape(x1.shape) for g in _kernels.fh_core(delta, xs, ws))
    f = 0.5 * (x1 + x2) + h * g0
    f1 = 0.5 + g1
    f2 = 0.5 - g1
    curv = g2 / h
    return f, f1, f2, curv, -curv, curv


def mollified_max(x1, x2, h: float, order: int = GL_ORDER):
    f = mollified_max_parts(x1, x2, h, order)[0]
    return float(f) if np.ndim(f) == 0 else f


def mollified_max_function(h: float, order: int = GL_ORDER) -> Bivariate:
    return Bivariate(lambda a, b: mollified_max_parts(a, b, h, order)[0],
                     lambda a, b: mollified_max_parts(a, b, h, order), f"fmax_{h:g}")


def alpha_tensor(order: int = GL_ORDER) -> float:
    """``f_h(0, 0)/h`` from the tensor Gauss-Legendre rule."""
    return float(mollified_max_parts(0.0, 0.0, 1.0, order)[0])


def _bump(s):
    return math.exp(-1.0 / (1.0 - s * s)) if s < 1.0 else 0.0


def alpha_radial() -> float:
    """``2 sqrt(2) ∫_0^1 s^2 phi(s) ds`` with ``phi`` normalized to unit planar mass, by adaptive quadrature."""
    mass, _ = sp_integrate.quad(lambda s: 2.0 * math.pi * s * _bump(s), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    second, _ = sp_integrate.quad(lambda s: s * s * _bump(s), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    return 2.0 * math.sqrt(2.0) * second / mass


# Lipschitz ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzReport:
    ratio: float
    oscillation: float
    bound: float
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def lipschitz_check(u: ScalarField, center, R: float, samples: int = 256, seed: int = 0,
                    slack: float = LIPSCHITZ_SLACK, domain: Optional[Region] = None) -> LipschitzReport:
    """Largest sampled ``|u(x)-u(y)|/d(x,y)`` on ``B(center, R/4)`` against ``osc_{B(center, 2R)} u / R``.

    ``domain``, when given, must contain ``B(center, 2R)``.
    """
    center = _to_point(center)
    big = Ball(center, 2.0 * R)
    if domain is not None:
        rim = big.sample_boundary(400)
        if not np.all(domain.contains(rim)):
            raise DomainError("B(center, 2R) is not inside the domain")
    small = Ball(center, R / 4.0)
    pts = small.sample_interior(samples, seed=seed)
    i, j = np.triu_indices(samples, k=1)
    dist = np.asarray(distance(pts[i], pts[j]))
    vals = np.asarray(u(pts))
    ok = dist > 0
    ratio = float(np.max(np.abs(vals[i] - vals[j])[ok] / dist[ok])) if np.any(ok) else 0.0
    cloud = np.concatenate([big.sample_interior(4 * samples, seed=seed + 1), big.sample_boundary(4 * samples)])
    cv = np.asarray(u(cloud))
    osc = float(cv.max() - cv.min())
    bound = osc / R
    return LipschitzReport(ratio, osc, bound, slack, bool(ratio <= slack * bound + 1e-12))
