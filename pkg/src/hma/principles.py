"""Verification harness for the comparison, maximum and oscillation principles.

Every ``verify_*`` function returns a :class:`VerificationReport`.  Sampled
hypothesis checks run first; if any fails the status is
``hypothesis_failed`` and the conclusion is reported but not judged.  Only
``conclusion_failed`` would indicate a numerical or implementation error.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .barriers import epsilon_perturb, exp_barrier, gauge_cone, horizontal_square, quartic_barrier
from .catalog import h_convex_fields, translated_catalog
from .convexity import check_psd, convex_compose, mollified_max_function
from .group import (
    ORIGIN,
    GaugeBall,
    Point,
    compose,
    distance,
    exp_flow,
    gauge,
    inverse,
    lambda_to_boundary,
)
from .jets import (
    T_COORD,
    X_COORD,
    Y_COORD,
    ScalarField,
    constant,
    exponential,
    horizontal_jet,
    power,
    quartic_gauge,
    radial_field,
)
from .measure import (
    QuadratureSpec,
    c1_polar,
    h_measure,
    integrate,
    ma_density_fn,
    mollify,
    oscillation_constant,
    trace_constant,
    trace_density_fn,
)
from .regions import Annulus, Ball, Box, Region

TOL = 1e-8

SQRT8_5 = math.sqrt(8.0) - 5.0**0.25
NEAR_FACTORS = (0.5, (3 - 17**0.25) / (4 - 17**0.25), (3 - 8**0.25) / (4 - 8**0.25), 2.0 / 3.0)
NEAR_BOUNDS = (2.0, 4 - 17**0.25, 4 - 8**0.25, 3.0)
LOOP_FACTORS = (0.5, (SQRT8_5 - 1) / SQRT8_5, 1 - 1 / math.sqrt(2.0), (SQRT8_5 - 1) / SQRT8_5)
LOOP_BOUNDS = (2.0, SQRT8_5, math.sqrt(2.0), SQRT8_5)
NEAR_CONSTANT = math.prod(NEAR_FACTORS)
LOOP_CONSTANT = math.prod(LOOP_FACTORS)
AXIS_FACTOR = 0.5
AXIS_BOUND = 2.0


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class VerificationReport:
    name: str
    hypothesis_checks: dict
    lhs: float
    rhs: float
    margin: float
    passed: bool
    quadrature_error: float
    status: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(name, hyps: dict, lhs, rhs, qerr, details=None, extra_ok=True) -> VerificationReport:
    """Assemble a report; conclusion holds iff ``rhs - lhs >= -qerr`` and ``extra_ok``."""
    hyps = {k: bool(v) for k, v in hyps.items()}
    lhs, rhs, qerr = float(lhs), float(rhs), float(qerr)
    margin = rhs - lhs
    conclusion = bool(margin >= -qerr and extra_ok)
    if not all(hyps.values()):
        status, passed = "hypothesis_failed", False
    elif conclusion:
        status, passed = "pass", True
    else:
        status, passed = "conclusion_failed", False
    d = dict(details or {})
    d["conclusion_holds"] = conclusion
    return VerificationReport(name, hyps, lhs, rhs, margin, passed, qerr, status, d)


def _scale(*arrays) -> float:
    return 1.0 + max(float(np.max(np.abs(a))) if np.size(a) else 0.0 for a in arrays)


# comparison principles ------------------------------------------------------------


def verify_integral_comparison(u: ScalarField, v: ScalarField, region: Region,
                               spec: QuadratureSpec = QuadratureSpec(), samples: int = 512,
                               seed: int = 0, tol: float = TOL, name: str = "integral_comparison"):
    """``∫ det H(u) + 12 u_t^2 <= ∫ det H(v) + 12 v_t^2`` when ``v <= u``, ``v = u`` on the boundary."""
    inner = region.sample_interior(samples, seed=seed)
    rim = region.sample_boundary(samples)
    ub, vb = u(rim), v(rim)
    ui, vi = u(inner), v(inner)
    s = _scale(ub, vb, ui, vi)
    hyps = {
        "sum_h_convex": check_psd(u + v, region, samples, tol, seed).convex,
        "boundary_equal": bool(np.max(np.abs(vb - ub)) <= tol * s),
        "interior_below": bool(np.max(vi - ui) <= tol * s),
    }
    lhs = integrate(ma_density_fn(u), region, spec)
    rhs = integrate(ma_density_fn(v), region, spec)
    tu = integrate(trace_density_fn(u), region, spec)
    tv = integrate(trace_density_fn(v), region, spec)
    trace_ok = tu.value <= tv.value + tu.error_indicator + tv.error_indicator
    details = {"trace_lhs": tu.value, "trace_rhs": tv.value, "trace_holds": trace_ok}
    return _report(name, hyps, lhs.value, rhs.value, lhs.error_indicator + rhs.error_indicator,
                   details, extra_ok=trace_ok)


def _a_matrix(a, pts) -> np.ndarray:
    m = np.asarray(a(pts) if callable(a) else a, dtype=float)
    if m.shape == (2, 2):
        m = np.broadcast_to(m, (pts.shape[0], 2, 2))
    return m


def verify_weak_maximum(a, w: ScalarField, region: Region, samples: int = 512, seed: int = 0,
                        tol: float = TOL, name: str = "weak_maximum"):
    """If ``a`` is PSD with positive trace, ``L w = sum a_ij X_i X_j w >= 0`` and ``w <= 0`` on the boundary, then ``w <= 0``."""
    inner = region.sample_interior(samples, seed=seed)
    rim = region.sample_boundary(samples)
    am = _a_matrix(a, inner)
    eig = np.linalg.eigvalsh(0.5 * (am + np.swapaxes(am, -1, -2)))
    hj = horizontal_jet(w, inner)
    lw = am[:, 0, 0] * hj.XXu + am[:, 0, 1] * hj.XYu + am[:, 1, 0] * hj.YXu + am[:, 1, 1] * hj.YYu
    wb, wi = w(rim), w(inner)
    s = _scale(wb, wi)
    hyps = {
        "coefficients_psd": bool(eig.min() >= -tol),
        "trace_positive": bool(np.min(am[:, 0, 0] + am[:, 1, 1]) > 0),
        "Lw_nonnegative": bool(lw.min() >= -tol * _scale(lw)),
        "boundary_nonpositive": bool(wb.max() <= tol * s),
    }
    return _report(name, hyps, float(wi.max()), 0.0, tol * s, {"min_Lw": float(lw.min())})


def verify_pointwise_comparison(u: ScalarField, v: ScalarField, region: Region, samples: int = 512,
                                seed: int = 0, tol: float = TOL, name: str = "pointwise_comparison"):
    """``det H(u) >= det H(v)``, ``u+v`` H-convex with positive trace and ``u <= v`` on the boundary give ``u <= v``."""
    inner = region.sample_interior(samples, seed=seed)
    rim = region.sample_boundary(samples)
    hu = horizontal_jet(u, inner).hessian()
    hv = horizontal_jet(v, inner).hessian()
    hs = hu + hv
    du, dv = hu.det, hv.det
    ub, vb, ui, vi = u(rim), v(rim), u(inner), v(inner)
    s = _scale(ub, vb, ui, vi)
    hyps = {
        "sum_h_convex": bool(np.min(hs.min_eigenvalue) >= -tol * _scale(hs.trace)),
        "trace_positive": bool(np.min(hs.trace) > 0),
        "det_dominance": bool(np.min(du - dv) >= -tol * _scale(du, dv)),
        "boundary_ordered": bool(np.max(ub - vb) <= tol * s),
    }
    diff = ui - vi
    return _report(name, hyps, float(diff.max()), 0.0, tol * s, {"worst_interior_gap": float(diff.max())})


def _richardson_eps2(eps: Sequence[float], values: Sequence[float]) -> float:
    e1, e2 = eps[-2] ** 2, eps[-1] ** 2
    v1, v2 = values[-2], values[-1]
    return (e1 * v2 - e2 * v1) / (e1 - e2)


def verify_perforated_comparison(v: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec(),
                                 eps_sequence: Sequence[float] = (0.2, 0.1, 0.05), samples: int = 512,
                                 seed: int = 0, tol: float = TOL, name: str = "perforated_comparison",
                                 c1: Optional[float] = None):
    """The cone with ``m = -v(center)`` has no more Monge-Ampere mass on the punctured ball than ``v``.

    Both integrals are taken over ``B_R minus B_eps`` and extrapolated to
    ``eps = 0`` linearly in ``eps^2``.  The cone side is cross-checked
    against ``c1 m^2``.
    """
    eps = [float(e) for e in eps_sequence]
    if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_sequence must be strictly decreasing with at least two entries")
    rim = ball.sample_boundary(samples)
    vb = v(rim)
    m = -float(v(np.array(ball.center)))
    hyps = {
        "boundary_zero": bool(np.max(np.abs(vb)) <= tol * _scale(vb, m)),
        "h_convex": check_psd(v, ball, samples, tol, seed).convex,
        "center_nonpositive": m >= 0,
    }
    cone = gauge_cone(ball.center, ball.radius, max(m, 0.0))
    cone_vals, v_vals, ind, cone_ind = [], [], 0.0, 0.0
    for e in eps:
        sp = QuadratureSpec(spec.base_resolution, spec.refinement_levels, e)
        a = integrate(ma_density_fn(cone), ball, sp)
        b = integrate(ma_density_fn(v), ball, sp)
        cone_vals.append(a.value)
        v_vals.append(b.value)
        ind = max(ind, a.error_indicator, b.error_indicator)
        cone_ind = a.error_indicator
    # extrapolation amplifies each value by e1^2/(e1^2 - e2^2)
    amp = (eps[-2] ** 2 + eps[-1] ** 2) / (eps[-2] ** 2 - eps[-1] ** 2)
    lhs = _richardson_eps2(eps, cone_vals)
    rhs = _richardson_eps2(eps, v_vals)
    qerr = 2.0 * amp * ind
    c1 = c1_polar() if c1 is None else c1
    target = c1 * m * m
    details = {
        "m": m,
        "eps": eps,
        "cone_side": cone_vals,
        "v_side": v_vals,
        "c1_m2": target,
        "cone_vs_c1m2_gap": abs(lhs - target),
        "cone_indicator": cone_ind,
        "cone_vs_c1m2_within": bool(abs(lhs - target) <= 2.0 * cone_ind),
        "indicator": ind,
    }
    return _report(name, hyps, lhs, rhs, qerr, details)


def verify_nonpositivity(u: ScalarField, region: Region, samples: int = 512, seed: int = 0,
                         tol: float = TOL, name: str = "nonpositivity"):
    """An H-convex ``u <= 0`` on the boundary stays ``<= 0`` inside."""
    inner = region.sample_interior(samples, seed=seed)
    rim = region.sample_boundary(samples)
    ub, ui = u(rim), u(inner)
    s = _scale(ub, ui)
    hyps = {"boundary_nonpositive": bool(ub.max() <= tol * s)}
    if u.smooth:
        hyps["h_convex"] = check_psd(u, region, samples, tol, seed).convex
    return _report(name, hyps, float(ui.max()), 0.0, tol * s)


# chain construction ------------------------------------------------------------------


@dataclass
class ChainReport:
    R: float
    case: str
    points: list
    labels: list
    lambdas: list
    lambda_bounds: list
    ratio_bounds: list
    step_factors: list
    total_factor: float
    axis_factor: float
    N: int
    N_formula: Optional[int]
    t_sequence: list
    sigma: Optional[float]
    closed_form_factor: Optional[float]
    corrected_closed_form_factor: Optional[float]

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _ChainBuilder:
    def __init__(self, R: float):
        self.R = R
        self.ball = GaugeBall(ORIGIN, R)
        self.points: list = []
        self.labels: list = []
        self.lambdas: list = []
        self.bounds: list = []
        self.ratio: list = []
        self.factors: list = []

    def start(self, p):
        self.points.append(Point(*map(float, p)))
        self.labels.append("start")

    def step(self, target, label: str, factor: float, bound: float):
        base = self.points[-1]
        target = Point(*map(float, target))
        lam = lambda_to_boundary(base, target, self.ball)
        alpha = gauge(base) / self.R
        beta = distance(base, target) / self.R
        self.points.append(target)
        self.labels.append(label)
        self.lambdas.append(lam)
        self.bounds.append(bound)
        self.ratio.append((1.0 - alpha) / beta if beta > 0 else math.inf)
        self.factors.append(factor)

    def loop(self, t: float, size: float, factors, bounds, tag: str):
        """Four flows around a square of side ``size`` starting at ``(0, 0, t)``."""
        if t > 0:
            moves = (("X", 1.0), ("Y", 1.0), ("X", -1.0), ("Y", -1.0))
        else:
            moves = (("Y", 1.0), ("X", 1.0), ("Y", -1.0), ("X", -1.0))
        for (d, sgn), f, b in zip(moves, factors, bounds):
            nxt = exp_flow(d, sgn * size, self.points[-1])
            self.step(nxt, f"{tag}:{'-' if sgn < 0 else ''}{d}", f, b)
        return self.points[-1].t


def build_chain(xi0, R: float) -> ChainReport:
    """Chain of flows and boundary dilations carrying a bound from ``xi0`` to the origin."""
    xi0 = Point(*map(float, xi0))
    if not R > 0:
        raise ValueError("R must be positive")
    if gauge(xi0) >= R:
        raise ValueError("xi0 must lie inside B_R(0)")
    b = _ChainBuilder(R)
    b.start(xi0)
    if xi0.x != 0.0 or xi0.y != 0.0:
        b.step((0.0, 0.0, xi0.t), "to_axis", AXIS_FACTOR, AXIS_BOUND)
    t0 = xi0.t
    ts = [t0]
    N = 0
    n_formula = None
    closed = corrected = None
    sigma = None
    if abs(t0) ** 0.5 <= R / 2.0:
        case = "near"
    else:
        case = "far"
        sgn = 1.0 if t0 > 0 else -1.0
        t = t0
        while sgn * t > R * R / 4.0:
            d = math.sqrt((R * R - abs(t)) / 6.0)
            t = b.loop(t, d, LOOP_FACTORS, LOOP_BOUNDS, f"loop{N}")
            ts.append(t)
            N += 1
        n_formula = int(math.ceil(math.log(3 * R * R / (4 * (R * R - abs(t0)))) / math.log(5.0 / 3.0)))
        q = 4 * (R * R - abs(t0)) / (3 * R * R)
        gamma = -math.log(NEAR_CONSTANT)
        closed = NEAR_CONSTANT**2 * q ** (gamma / math.log(5.0 / 3.0))
        gamma2 = -math.log(LOOP_CONSTANT)
        corrected = NEAR_CONSTANT * LOOP_CONSTANT * q ** (gamma2 / math.log(5.0 / 3.0))
    t_end = b.points[-1].t
    # a loop can land on the origin up to rounding; a near loop there would be spurious
    if abs(t_end) > 64.0 * sys.float_info.epsilon * R * R:
        sigma = math.sqrt(abs(t_end)) / 2.0
        b.loop(t_end, sigma, NEAR_FACTORS, NEAR_BOUNDS, "near")
    total = math.prod(b.factors)
    axis = math.prod(f for f, lab in zip(b.factors, b.labels[1:]) if lab != "to_axis")
    return ChainReport(
        R=R,
        case=case,
        points=[list(p) for p in b.points],
        labels=b.labels,
        lambdas=b.lambdas,
        lambda_bounds=b.bounds,
        ratio_bounds=b.ratio,
        step_factors=b.factors,
        total_factor=total,
        axis_factor=axis,
        N=N,
        N_formula=n_formula,
        t_sequence=ts,
        sigma=sigma,
        closed_form_factor=closed,
        corrected_closed_form_factor=corrected,
    )


def verify_chain_inequalities(u: ScalarField, chain: ChainReport, samples: int = 512, seed: int = 0,
                              tol: float = TOL, name: str = "chain_inequalities"):
    """``u(next) <= factor * u(prev)`` along the chain and ``u(0) <= total * u(xi0)``."""
    ball = Ball(ORIGIN, chain.R)
    rim = ball.sample_boundary(samples)
    inner = ball.sample_interior(samples, seed=seed)
    ub, ui = u(rim), u(inner)
    pts = np.array(chain.points)
    vals = np.asarray(u(pts))
    s = _scale(ub, ui, vals)
    hyps = {
        "boundary_zero": bool(np.max(np.abs(ub)) <= tol * s),
        "nonpositive": bool(np.max(ui) <= tol * s),
    }
    step_margins = [f * vals[i] - vals[i + 1] for i, f in enumerate(chain.step_factors)]
    steps_ok = all(m >= -tol * s for m in step_margins)
    lhs = float(u(np.array(ORIGIN)))
    rhs = chain.total_factor * float(vals[0])
    return _report(name, hyps, lhs, rhs, tol * s, {"step_margins": step_margins}, extra_ok=steps_ok)


def _minimize_in_ball(u: ScalarField, ball: Ball, samples: int, seed: int):
    pts = ball.sample_interior(samples, seed=seed)
    vals = np.asarray(u(pts))
    k = int(np.argmin(vals))
    best, best_val = pts[k], float(vals[k])

    def obj(p):
        if not ball.contains(p):
            return best_val + 1.0 + float(np.sum(p * p))
        return float(u(p))

    res = optimize.minimize(obj, best, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    if res.fun < best_val and ball.contains(res.x):
        best, best_val = res.x, float(res.fun)
    return np.asarray(best, dtype=float), best_val


def verify_abp(u: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec(), samples: int = 2048,
               seed: int = 0, tol: float = TOL, name: str = "abp", c1: Optional[float] = None):
    """``m0 <= m / c2`` and ``m0^2 <= (c1/c2^2) ∫ det H(u) + 12 u_t^2`` with ``m0 = -min u``."""
    rim = ball.sample_boundary(samples)
    ub = u(rim)
    xi0, umin = _minimize_in_ball(u, ball, samples, seed)
    m0 = -umin
    centre = np.array(ball.center)
    m = -float(u(centre))
    s = _scale(ub, m0, m)
    hyps = {
        "boundary_zero": bool(np.max(np.abs(ub)) <= tol * s),
        "h_convex": check_psd(u, ball, min(samples, 512), tol, seed).convex,
    }
    local = np.asarray(compose(inverse(tuple(centre)), xi0))
    if gauge(local) < 1e-14:
        c2 = 1.0
    else:
        c2 = build_chain(local, ball.radius).total_factor
    c1 = c1_polar() if c1 is None else c1
    mass = h_measure(u, ball, spec)
    value_ok = m0 <= m / c2 + tol * s
    lhs = m0 * m0
    rhs = c1 / c2**2 * mass.value
    sharp_rhs = mass.value / (c1 * c2**2)
    details = {
        "minimizer": list(map(float, xi0)),
        "m0": m0,
        "m": m,
        "c1": c1,
        "c2": c2,
        "ma_mass": mass.value,
        "ma_mass_indicator": mass.error_indicator,
        "value_bound_holds": bool(value_ok),
        "sharp_rhs": sharp_rhs,
        "sharp_bound_holds": bool(lhs <= sharp_rhs + mass.error_indicator / (c1 * c2**2) + tol * s),
    }
    qerr = c1 / c2**2 * mass.error_indicator + tol * s
    return _report(name, hyps, lhs, rhs, qerr, details, extra_ok=value_ok)


# measure-level comparison -------------------------------------------------------------


def sub_balls(region: Region) -> list[Ball]:
    """Fixed dyadic family: the half ball and four quarter balls around it."""
    c = region.center
    R = region.inradius if isinstance(region, Box) else getattr(region, "radius", region.inradius)
    out = [Ball(c, R / 2.0)]
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        out.append(Ball(compose(c, (dx * R / 2.0, dy * R / 2.0, 0.0)), R / 4.0))
    return out


def _continuous_measures(u, region, balls, h_sequence, spec, kernel_resolution, grid_resolution):
    vals = []
    inds = []
    for h in h_sequence:
        uh = mollify(u, h, region, kernel_resolution, grid_resolution)
        ests = [h_measure(uh, b, spec) for b in balls]
        vals.append([e.value for e in ests])
        inds.append([e.error_indicator for e in ests])
    vals = np.array(vals)
    ind = np.abs(vals[-1] - vals[-2]) + np.array(inds[-1])
    return vals[-1], ind


def verify_measure_comparison(u: ScalarField, v: ScalarField, region: Region,
                              spec: QuadratureSpec = QuadratureSpec(16, 2), h_sequence=(0.2, 0.1),
                              samples: int = 512, seed: int = 0, tol: float = TOL,
                              kernel_resolution: int = 8, grid_resolution: int = 24,
                              name: str = "measure_comparison"):
    """``mu(u) >= mu(v)`` on sub-balls and ``u <= v`` on the boundary give ``u <= v`` inside."""
    rim = region.sample_boundary(samples)
    inner = region.sample_interior(samples, seed=seed)
    ub, vb, ui, vi = u(rim), v(rim), u(inner), v(inner)
    s = _scale(ub, vb, ui, vi)
    hyps = {"boundary_ordered": bool(np.max(ub - vb) <= tol * s)}
    balls = sub_balls(region)
    mu, iu = _continuous_measures(u, region, balls, h_sequence, spec, kernel_resolution, grid_resolution)
    mv, iv = _continuous_measures(v, region, balls, h_sequence, spec, kernel_resolution, grid_resolution)
    hyps["measure_dominance"] = bool(np.all(mu >= mv - (iu + iv)))
    diff = ui - vi
    details = {
        "sub_balls": [{"center": list(b.center), "radius": b.radius} for b in balls],
        "mu_u": mu.tolist(),
        "mu_v": mv.tolist(),
    }
    return _report(name, hyps, float(diff.max()), 0.0, tol * s, details)


# oscillation --------------------------------------------------------------------------


def oscillation(u: ScalarField, ball: Ball, samples: int = 2048, seed: int = 0) -> float:
    pts = np.concatenate([ball.sample_interior(samples, seed=seed), ball.sample_boundary(samples)])
    vals = np.asarray(u(pts))
    return float(vals.max() - vals.min())


def verify_oscillation(u: ScalarField, sigma: float = 0.5, R: float = 1.0,
                       spec: QuadratureSpec = QuadratureSpec(), samples: int = 2048, seed: int = 0,
                       C: Optional[float] = None, center=ORIGIN, name: str = "oscillation"):
    """``mu(u)(B_{sigma R}) <= C osc_{B_R}(u)^2`` and ``∫_{B_{sigma R}} trace H(u) <= C' R^2 osc``."""
    C = oscillation_constant(sigma) if C is None else C
    ct = trace_constant(sigma)
    outer = Ball(center, R)
    inner = Ball(center, sigma * R)
    osc = oscillation(u, outer, samples, seed)
    hyps = {"h_convex": check_psd(u, outer, 512, TOL, seed).convex}
    mass = h_measure(u, inner, spec)
    tr = integrate(trace_density_fn(u), inner, spec)
    trace_ok = tr.value <= ct * R * R * osc + tr.error_indicator
    details = {
        "C": C,
        "C_trace": ct,
        "osc": osc,
        "ratio": mass.value / osc**2 if osc > 0 else None,
        "trace_integral": tr.value,
        "trace_bound": ct * R * R * osc,
        "trace_holds": bool(trace_ok),
    }
    return _report(name, hyps, mass.value, C * osc * osc, mass.error_indicator, details, extra_ok=trace_ok)


# suites -------------------------------------------------------------------------------
#
# Instances are written on unit-scale regions and mapped to radius ``R`` by
# the dilation ``delta_R``: fields become ``u(delta_{1/R} .)`` and regions are
# dilated, which keeps every hypothesis and conclusion intact.


class _Scale:
    def __init__(self, R: float):
        if not R > 0:
            raise ValueError("R must be positive")
        self.R = float(R)

    def f(self, u: ScalarField) -> ScalarField:
        return u if self.R == 1.0 else u.dilated(1.0 / self.R)

    def pt(self, p):
        R = self.R
        return Point(p[0] * R, p[1] * R, p[2] * R * R)

    def ball(self, center, radius) -> Ball:
        return Ball(self.pt(center), radius * self.R)

    def annulus(self, center, r_in, r_out) -> Annulus:
        return Annulus(self.pt(center), r_in * self.R, r_out * self.R)

    def box(self, lo, hi) -> Box:
        return Box(self.pt(lo), self.pt(hi))

    def coeff(self, a):
        if callable(a):
            s = np.array([1.0 / self.R, 1.0 / self.R, 1.0 / self.R**2])
            return lambda p: a(p * s)
        return a


def _w():
    return horizontal_square()


def _r():
    return quartic_gauge()


def _rand_psd(seed: int) -> np.ndarray:
    g = np.random.default_rng(seed).normal(size=(2, 2))
    return g @ g.T + 0.1 * np.eye(2)


def _variable_a(p):
    x, y = p[:, 0], p[:, 1]
    return np.stack([np.stack([1 + x * x, x * y], -1), np.stack([x * y, 1 + y * y], -1)], -2)


def _zero_on_sphere(h_profile, R):
    """``h(r) - h(R^4)`` for an increasing convex profile ``h``."""
    return radial_field(h_profile) - float(h_profile.f(np.array(R**4)))


def suite_integral_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    out = []
    cases = [(1.0, 0.5, 1.0, ORIGIN), (2.0, 1.0, 1.0, ORIGIN), (1.0, 0.25, 0.8, ORIGIN),
             (1.0, 0.5, 1.0, (0.2, 0.1, 0.1)), (3.0, 0.2, 1.2, (-0.1, 0.3, 0.0))]
    for k, (A, mu, rad, c) in enumerate(cases):
        u = _w() * A
        bump = _r() - rad**4
        if tuple(c) != tuple(ORIGIN):
            u, bump = u.translated(c), bump.translated(c)
        v = u + bump * mu
        out.append(verify_integral_comparison(S.f(u), S.f(v), S.ball(c, rad), spec, seed=seed,
                                              name=f"integral_comparison[{k}] A={A} mu={mu} R={rad * R:g}"))
    u = _w()
    v = u + (radial_field(exponential()) - math.e) * 0.3
    out.append(verify_integral_comparison(S.f(u), S.f(v), S.ball(ORIGIN, 1.0), spec, seed=seed,
                                          name="integral_comparison[5] exp profile"))
    out.append(verify_integral_comparison(S.f(u), S.f(u), S.ball(ORIGIN, 1.0), spec, seed=seed,
                                          name="integral_comparison[6] equality"))
    return out


def broken_integral_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    u = _w()
    v = u + (_r() - 1.0) * 0.5
    return [verify_integral_comparison(S.f(v), S.f(u), S.ball(ORIGIN, 1.0), spec, seed=seed,
                                       name="integral_comparison[broken] roles swapped")]


def suite_weak_maximum(spec, seed=0, R=1.0):
    S = _Scale(R)
    c = (0.3, -0.2, 0.1)
    cases = [
        (np.eye(2), _w() - 1.0, S.ball(ORIGIN, 1.0)),
        (np.eye(2), _r() - 1.0, S.ball(ORIGIN, 1.0)),
        (_rand_psd(seed + 1), _w() - 1.0, S.ball(ORIGIN, 1.0)),
        (_variable_a, (X_COORD + Y_COORD).apply(exponential()) - math.exp(math.sqrt(2.0)), S.ball(ORIGIN, 1.0)),
        (_rand_psd(seed + 2), radial_field(power(2)) - 1.0, S.ball(ORIGIN, 1.0)),
        (_variable_a, (_w() - 0.64).translated(c), S.ball(c, 0.8)),
    ]
    return [verify_weak_maximum(S.coeff(a), S.f(w), reg, seed=seed, name=f"weak_maximum[{k}] {w.name}")
            for k, (a, w, reg) in enumerate(cases)]


def broken_weak_maximum(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_weak_maximum(np.eye(2), S.f(exp_barrier(1.0, 10.0)), S.ball(ORIGIN, 1.0), seed=seed,
                                name="weak_maximum[broken] exponential barrier")]


def suite_pointwise_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    out = []
    for k, v in enumerate([_w(), (X_COORD + Y_COORD).apply(exponential()), _r() + _w()]):
        out.append(verify_pointwise_comparison(S.f(v - 0.3), S.f(v), S.ball(ORIGIN, 1.0), seed=seed,
                                               name=f"pointwise_comparison[{k}] shift {v.name}"))
    r_in, m = 0.2, 1.0
    for k, eps in enumerate((0.1, 0.05)):
        c0 = min(-eps, m * (r_in - 1.0) - eps * r_in * r_in)
        u = _w() * eps + c0
        out.append(verify_pointwise_comparison(S.f(u), S.f(gauge_cone(ORIGIN, 1.0, m)), S.annulus(ORIGIN, r_in, 1.0),
                                               seed=seed,
                                               name=f"pointwise_comparison[{3 + k}] paraboloid under cone eps={eps}"))
    return out


def broken_pointwise_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_pointwise_comparison(S.f(_w() - 10.0), S.f(_w() * 2.0), S.ball(ORIGIN, 1.0), seed=seed,
                                        name="pointwise_comparison[broken] det violated")]


def suite_perforated_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    c = (0.2, -0.1, 0.05)
    cases = [
        (quartic_barrier(1.0, 0.5, -1.0), S.ball(ORIGIN, 1.0)),
        (quartic_barrier(1.5, 0.3, -0.5), S.ball(ORIGIN, 1.5)),
        (_r() - 1.0, S.ball(ORIGIN, 1.0)),
        (_zero_on_sphere(exponential(), 1.0), S.ball(ORIGIN, 1.0)),
        ((_r() - 0.6**4).translated(c), S.ball(c, 0.6)),
        (gauge_cone(ORIGIN, 1.0, 1.0), S.ball(ORIGIN, 1.0)),
    ]
    c1 = c1_polar()
    return [verify_perforated_comparison(S.f(v), b, spec, eps_sequence=tuple(e * R for e in (0.2, 0.1, 0.05)),
                                         seed=seed, c1=c1, name=f"perforated_comparison[{k}] {v.name}")
            for k, (v, b) in enumerate(cases)]


def broken_perforated_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_perforated_comparison(S.f(_r() - 0.5), S.ball(ORIGIN, 1.0), spec,
                                         eps_sequence=tuple(e * R for e in (0.2, 0.1, 0.05)), seed=seed,
                                         name="perforated_comparison[broken] nonzero boundary")]


def suite_nonpositivity(spec, seed=0, R=1.0):
    S = _Scale(R)
    c = (0.3, 0.1, -0.2)
    cases = [
        (_w() - 1.0, S.ball(ORIGIN, 1.0)),
        (gauge_cone(ORIGIN, 1.0, 1.0), S.ball(ORIGIN, 1.0)),
        (_r() - 16.0, S.ball(ORIGIN, 2.0)),
        (_zero_on_sphere(exponential(), 1.0), S.ball(ORIGIN, 1.0)),
        (quartic_barrier(1.0, 0.5, -2.0), S.ball(ORIGIN, 1.0)),
        ((_w() - 0.49).translated(c), S.ball(c, 0.7)),
        (_w() - 2.0, S.box((-1, -1, -1), (1, 1, 1))),
    ]
    return [verify_nonpositivity(S.f(u), reg, seed=seed, name=f"nonpositivity[{k}] {u.name}")
            for k, (u, reg) in enumerate(cases)]


def broken_nonpositivity(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_nonpositivity(S.f(_w() - 0.5), S.ball(ORIGIN, 1.0), seed=seed,
                                 name="nonpositivity[broken] positive boundary")]


CHAIN_STARTS = [(0.1, 0.2, 0.05), (0.3, -0.2, -0.1), (0.0, 0.0, 0.5), (0.05, 0.1, 0.9),
                (-0.2, 0.1, -0.8), (0.4, 0.4, 0.0)]


def suite_chain_inequalities(spec, seed=0, R=1.0):
    S = _Scale(R)
    fields = [_r() - 1.0, gauge_cone(ORIGIN, 1.0, 1.0), _zero_on_sphere(exponential(), 1.0),
              quartic_barrier(1.0, 0.5, -1.0), radial_field(power(2)) - 1.0, constant(0.0)]
    out = []
    for k, (u, xi0) in enumerate(zip(fields, CHAIN_STARTS)):
        chain = build_chain(S.pt(xi0), R)
        out.append(verify_chain_inequalities(S.f(u), chain, seed=seed,
                                             name=f"chain_inequalities[{k}] {u.name} from {xi0}"))
    return out


def broken_chain_inequalities(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_chain_inequalities(S.f(_w() - 0.25), build_chain(S.pt((0.1, 0.2, 0.05)), R), seed=seed,
                                      name="chain_inequalities[broken] nonzero boundary")]


def off_centre_minimum(h: float = 0.2) -> ScalarField:
    """Mollified max of ``r - 1`` and a translated quartic; vanishes on the unit sphere."""
    b = (_r() * 0.1 - 0.95).translated((0.5, 0.0, 0.0))
    f = convex_compose(mollified_max_function(h), _r() - 1.0, b)
    f.name = "fmax(r-1, 0.1 r_c - 0.95)"
    return f


def suite_abp(spec, seed=0, R=1.0):
    S = _Scale(R)
    c1 = c1_polar()
    fields = [_r() - 1.0, _zero_on_sphere(exponential(), 1.0), quartic_barrier(1.0, 0.5, -1.0),
              radial_field(power(2)) - 1.0, off_centre_minimum(), constant(0.0)]
    out = [verify_abp(S.f(u), S.ball(ORIGIN, 1.0), spec, seed=seed, c1=c1, name=f"abp[{k}] {u.name}")
           for k, u in enumerate(fields)]
    c = (0.1, 0.2, -0.1)
    out.append(verify_abp(S.f((_r() - 0.8**4).translated(c)), S.ball(c, 0.8), spec, seed=seed, c1=c1,
                          name="abp[6] translated quartic"))
    return out


def broken_abp(spec, seed=0, R=1.0):
    S = _Scale(R)
    return [verify_abp(S.f(_w() - 0.5), S.ball(ORIGIN, 1.0), spec, seed=seed, name="abp[broken] nonzero boundary")]


def _measure_spec(spec):
    return QuadratureSpec(max(8, spec.base_resolution // 2), 2)


def suite_measure_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    ball = S.ball(ORIGIN, 1.0)
    hs = (0.2 * R, 0.1 * R)
    out = []
    for k, u in enumerate([_w(), _r(), (X_COORD + Y_COORD).apply(exponential())]):
        out.append(verify_measure_comparison(S.f(u), S.f(u + 0.5), ball, _measure_spec(spec), hs, seed=seed,
                                             name=f"measure_comparison[{k}] shift {u.name}"))
    for k, v in enumerate([_r(), _w() * 0.5 + T_COORD.apply(power(2))]):
        u = epsilon_perturb(v, 0.5) - 0.5
        out.append(verify_measure_comparison(S.f(u), S.f(v), ball, _measure_spec(spec), hs, seed=seed,
                                             name=f"measure_comparison[{3 + k}] perturbed {v.name}"))
    return out


def broken_measure_comparison(spec, seed=0, R=1.0):
    S = _Scale(R)
    w = _w() - 1.0
    return [verify_measure_comparison(S.f(w * 1.2), S.f(w), S.box((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)),
                                      _measure_spec(spec), (0.2 * R, 0.1 * R), seed=seed,
                                      name="measure_comparison[broken] boundary unordered")]


def suite_oscillation(spec, seed=0, R=1.0, doubled: bool = False):
    S = _Scale(R)
    fields = translated_catalog() if doubled else h_convex_fields()
    C = oscillation_constant(0.5)
    return [verify_oscillation(S.f(u), 0.5, R, spec, seed=seed, C=C, name=f"oscillation[{k}] {name}")
            for k, (name, u) in enumerate(fields.items())]


def broken_oscillation(spec, seed=0, R=1.0):
    S = _Scale(R)
    u = T_COORD.apply(power(2)) * -1.0
    return [verify_oscillation(S.f(u), 0.5, R, spec, seed=seed, name="oscillation[broken] -t^2")]


SUITES: dict[str, tuple[Callable, Callable]] = {
    "comparison": (suite_integral_comparison, broken_integral_comparison),
    "weak-max": (suite_weak_maximum, broken_weak_maximum),
    "pointwise": (suite_pointwise_comparison, broken_pointwise_comparison),
    "perforated": (suite_perforated_comparison, broken_perforated_comparison),
    "nonpos": (suite_nonpositivity, broken_nonpositivity),
    "chain-ineq": (suite_chain_inequalities, broken_chain_inequalities),
    "abp": (suite_abp, broken_abp),
    "oscillation": (suite_oscillation, broken_oscillation),
    "measure-comparison": (suite_measure_comparison, broken_measure_comparison),
}


def run_suite(name: str, spec: QuadratureSpec, seed: int = 0, broken: bool = False,
              R: float = 1.0) -> list[VerificationReport]:
    """Run one suite (or its broken-hypothesis controls) at outer radius ``R``."""
    pos, neg = SUITES[name]
    return (neg if broken else pos)(spec, seed, R)


def summary_csv(reports: Sequence[VerificationReport]) -> str:
    lines = ["case,lhs,rhs,margin,pass"]
    for r in reports:
        lines.append(f"{json.dumps(r.name)},{r.lhs!r},{r.rhs!r},{r.margin!r},{str(r.passed).lower()}")
    return "\n".join(lines) + "\n"
