"""Quadrature over regions, the Monge-Ampere measure, and group mollification.

Integrals use a midpoint tensor rule on the region's local bounding box with
a membership indicator.  Cell contributions are computed in fixed chunks
(optionally on a thread pool capped by ``HMA_THREADS``), concatenated in
cell order and reduced by a fixed pairwise tree, so the result does not
depend on scheduling.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .group import compose, gauge
from .jets import GridField, ScalarField, horizontal_jet
from .regions import Annulus, Ball, Box, Region

_CHUNK_SLABS = 8


def thread_count() -> int:
    raw = os.environ.get("HMA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolutions ``base_resolution * 2**k`` for ``k < refinement_levels``.

    Only the last two levels are evaluated; the finest gives the value and
    their difference the error indicator.  ``singular_exclusion`` removes the
    gauge ball of that radius around the region centre.
    """

    base_resolution: int = 32
    refinement_levels: int = 2
    singular_exclusion: float = 0.0

    def __post_init__(self):
        if self.base_resolution < 8:
            raise ValueError("base_resolution must be at least 8")
        if self.refinement_levels < 2:
            raise ValueError("need at least two refinement levels for an error indicator")
        if self.singular_exclusion < 0:
            raise ValueError("singular_exclusion must be nonnegative")

    @classmethod
    def finest(cls, resolution: int, eps: float = 0.0) -> "QuadratureSpec":
        """Spec whose finest level is ``resolution`` cells per axis."""
        if resolution % 2:
            raise ValueError("resolution must be even")
        return cls(resolution // 2, 2, eps)

    @property
    def resolutions(self) -> list[int]:
        return [self.base_resolution * 2**k for k in range(self.refinement_levels)]


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    error_indicator: float
    cells: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_exclusion(region: Region, eps: float):
    if eps > 0 and eps >= region.inradius and not isinstance(region, Box):
        raise ValueError("singular exclusion must be smaller than the region's inradius")


def _midpoint_axes(region: Region, n: int):
    lo, hi = region.local_box()
    h = (hi - lo) / n
    axes = [lo[i] + (np.arange(n) + 0.5) * h[i] for i in range(3)]
    return axes, float(np.prod(h))


def _slab_values(density, region: Region, axes, eps: float, rows: np.ndarray) -> np.ndarray:
    gx, gy, gt = np.meshgrid(axes[0][rows], axes[1], axes[2], indexing="ij")
    q = np.stack([gx.ravel(), gy.ravel(), gt.ravel()], axis=-1)
    mask = region.contains_local(q)
    if eps > 0:
        mask &= gauge(q) >= eps
    out = np.zeros(q.shape[0])
    if np.any(mask):
        vals = np.asarray(density(region.to_global(q[mask])), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("density is not finite inside the region")
        out[mask] = vals
    return out


def _level(density, region: Region, n: int, eps: float) -> float:
    axes, cell = _midpoint_axes(region, n)
    chunks = [np.arange(i, min(i + _CHUNK_SLABS, n)) for i in range(0, n, _CHUNK_SLABS)]
    work = lambda rows: _slab_values(density, region, axes, eps, rows)
    threads = thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return _kernels.pairwise_sum(np.concatenate(parts)) * cell


def integrate(density: Callable, region: Region, spec: QuadratureSpec = QuadratureSpec()) -> MeasureEstimate:
    """Integral of ``density`` (flat global points -> values) over ``region``."""
    eps = spec.singular_exclusion
    _check_exclusion(region, eps)
    coarse_n, fine_n = spec.resolutions[-2:]
    coarse = _level(density, region, coarse_n, eps)
    fine = _level(density, region, fine_n, eps)
    return MeasureEstimate(float(fine), float(abs(fine - coarse)), int(fine_n**3))


def unit_density(p: np.ndarray) -> np.ndarray:
    return np.ones(p.shape[0])


def volume(region: Region, spec: QuadratureSpec = QuadratureSpec()) -> MeasureEstimate:
    return integrate(unit_density, region, spec)


def ma_density_fn(u: ScalarField) -> Callable:
    def density(p):
        hj = horizontal_jet(u, p)
        return hj.hessian().det + 12.0 * hj.Ut**2

    return density


def trace_density_fn(u: ScalarField) -> Callable:
    def density(p):
        hj = horizontal_jet(u, p)
        return hj.XXu + hj.YYu

    return density


def h_measure(u: ScalarField, region: Region, spec: QuadratureSpec = QuadratureSpec()) -> MeasureEstimate:
    """``mu(u)(region) = ∫ det H(u) + 12 u_t^2``."""
    return integrate(ma_density_fn(u), region, spec)


def weighted_h_measure(u: ScalarField, weight: Callable, region: Region, spec: QuadratureSpec) -> MeasureEstimate:
    """``∫ f dmu(u)``; the density is only evaluated where ``f`` is nonzero."""
    dens = ma_density_fn(u)

    def density(p):
        f = np.asarray(weight(p), dtype=float)
        out = np.zeros(p.shape[0])
        nz = f != 0.0
        if np.any(nz):
            out[nz] = f[nz] * dens(p[nz])
        return out

    return integrate(density, region, spec)


# mollification -------------------------------------------------------------------


def kernel_nodes(h: float, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Points of the gauge ball of radius ``h`` with normalized bump weights."""
    if resolution < 2:
        raise ValueError("kernel resolution must be at least 2")
    g = (np.arange(resolution) + 0.5) / resolution * 2.0 - 1.0
    a, b, c = np.meshgrid(g * h, g * h, g * h * h, indexing="ij")
    q = np.stack([a.ravel(), b.ravel(), c.ravel()], axis=-1)
    s = gauge(q) / h
    keep = s < 1.0
    q, s = q[keep], s[keep]
    w = np.exp(-1.0 / (1.0 - s * s))
    return q, w / w.sum()


def mollify(
    u: ScalarField,
    h: float,
    region: Region,
    kernel_resolution: int = 8,
    grid_resolution: int = 24,
    name: str | None = None,
) -> GridField:
    """Group mollification ``u_h(xi) = sum_k w_k u(eta_k ∘ xi)`` on a grid covering ``region``.

    Each left translate of an H-convex function is H-convex, and averages of
    H-convex functions are H-convex, so the result keeps convexity.
    """
    if not h > 0:
        raise ValueError("mollification radius must be positive")
    eta, w = kernel_nodes(h, kernel_resolution)
    lo, hi = region.global_box()
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    axes = [np.linspace(lo[i], hi[i], grid_resolution) for i in range(3)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = np.empty(nodes.shape[0])
    block = max(1, 200_000 // max(1, eta.shape[0]))
    for i in range(0, nodes.shape[0], block):
        xi = nodes[i : i + block]
        shifted = np.asarray(compose(eta[:, None, :], xi[None, :, :])).reshape(-1, 3)
        uv = np.asarray(u(shifted), dtype=float).reshape(eta.shape[0], xi.shape[0])
        if not np.all(np.isfinite(uv)):
            raise ValueError("field is not finite on the mollification neighbourhood")
        vals[i : i + block] = w @ uv
    return GridField(vals.reshape((grid_resolution,) * 3), lo, hi, name=name or f"mollify({u.name},{h:g})")


def h_measure_continuous(
    u: ScalarField,
    region: Region,
    h_sequence: Sequence[float],
    spec: QuadratureSpec = QuadratureSpec(),
    kernel_resolution: int = 8,
    grid_resolution: int = 24,
) -> MeasureEstimate:
    """``mu(u)(region)`` as the limit of measures of group mollifications.

    The indicator is the gap between the last two mollification radii plus
    the quadrature indicator at the last one.
    """
    hs = [float(h) for h in h_sequence]
    if len(hs) < 2 or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_sequence must be strictly decreasing with at least two entries")
    values = []
    last = None
    for h in hs:
        last = h_measure(mollify(u, h, region, kernel_resolution, grid_resolution), region, spec)
        values.append(last.value)
    gap = abs(values[-1] - values[-2])
    return MeasureEstimate(values[-1], gap + last.error_indicator, last.cells)


@dataclass(frozen=True)
class WeakConvergenceReport:
    values: list
    limit: float
    gaps: list
    monotone: bool
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def weak_convergence_test(
    u_seq: Sequence[ScalarField],
    u: ScalarField,
    f: Callable,
    region: Region,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: float = 1e-2,
) -> WeakConvergenceReport:
    """Compare ``∫ f dmu(u_k)`` with ``∫ f dmu(u)`` along the sequence."""
    limit = weighted_h_measure(u, f, region, spec).value
    values = [weighted_h_measure(uk, f, region, spec).value for uk in u_seq]
    gaps = [abs(v - limit) for v in values]
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    return WeakConvergenceReport(values, limit, gaps, monotone, tol, bool(gaps and gaps[-1] <= tol))


def oscillation_constant(sigma: float) -> float:
    """Bound ``C`` in ``mu(u)(B_{sigma R}) <= C osc^2``, from the quartic barrier comparison."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    return 24.0 * math.pi**2 / (1.0 - sigma**4) ** 2


def trace_constant(sigma: float) -> float:
    """Bound ``C`` in ``∫_{B_{sigma R}} trace H(u) <= C R^2 osc``."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    return 16.0 * math.pi / (1.0 - sigma**4)


def export_csv(u: ScalarField, points: np.ndarray, path) -> None:
    """Write ``x,y,t,value`` rows."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    vals = np.asarray(u(points), dtype=float).reshape(-1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,t,value\n")
        for p, v in zip(points, vals):
            fh.write(",".join(repr(float(c)) for c in (*p, v)) + "\n")


# reference constants ---------------------------------------------------------------


def c1_polar(order: int = 64) -> float:
    """``12 ∫_{B_1} (∂_t rho)^2`` with ``∂_t rho`` from the jet calculus.

    Rotational symmetry gives ``dx dy = pi dw`` with ``w = x^2 + y^2``; the
    half disk ``w^2 + t^2 < 1`` is then integrated in polar form
    ``(w, t) = s (cos phi, sin phi)`` by tensor Gauss-Legendre.
    """
    from .jets import gauge_field

    xs, ws = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (xs + 1.0)
    phi = 0.5 * math.pi * xs
    S, P = np.meshgrid(s, phi, indexing="ij")
    W = np.outer(0.5 * ws, 0.5 * math.pi * ws)
    pts = np.stack([np.sqrt(S * np.cos(P)), np.zeros_like(S), S * np.sin(P)], axis=-1)
    ut = gauge_field().jet(pts.reshape(-1, 3)).grad[2].reshape(S.shape)
    return float(np.sum(W * 12.0 * math.pi * ut**2 * S))


def c1_adaptive() -> float:
    """Same constant by adaptive quadrature over ``(w, t)`` with the derivative written out."""
    from scipy import integrate as sp_integrate

    def f(t, w):
        return 12.0 * math.pi * (0.5 * t * (w * w + t * t) ** -0.75) ** 2

    val, _ = sp_integrate.dblquad(
        f, 0.0, 1.0, lambda w: -math.sqrt(1.0 - w * w), lambda w: math.sqrt(1.0 - w * w),
        epsabs=1e-13, epsrel=1e-11,
    )
    return float(val)


def unit_ball_volume(resolution: int = 256) -> MeasureEstimate:
    """``|B_1|`` by the midpoint rule at high resolution."""
    return volume(Ball((0.0, 0.0, 0.0), 1.0), QuadratureSpec.finest(resolution))


__all__ = [
    "Annulus",
    "c1_adaptive",
    "c1_polar",
    "Ball",
    "Box",
    "MeasureEstimate",
    "QuadratureSpec",
    "Region",
    "WeakConvergenceReport",
    "export_csv",
    "h_measure",
    "h_measure_continuous",
    "integrate",
    "kernel_nodes",
    "ma_density_fn",
    "mollify",
    "oscillation_constant",
    "thread_count",
    "trace_constant",
    "trace_density_fn",
    "unit_ball_volume",
    "volume",
    "weak_convergence_test",
    "weighted_h_measure",
]
