"""The ten acceptance criteria.

Each test records one PASS/FAIL line per clause through the ``criterion``
fixture; the run summary lists one line per criterion.
"""

import json
import math
import subprocess
import time

import numpy as np
import pytest

from hma import cli
from hma.catalog import h_convex_fields, jet_test_fields
from hma.convexity import alpha_radial, alpha_tensor
from hma.group import compose, dilate, distance, gauge, inverse
from hma.jets import (
    affine_profile,
    exponential,
    gauge_field,
    horizontal_hessian,
    horizontal_jet,
    power,
    quartic_gauge,
    radial_det_closed_form,
    radial_field,
)
from hma.barriers import horizontal_square, quartic_barrier
from hma.measure import (
    QuadratureSpec,
    c1_adaptive,
    c1_polar,
    h_measure,
    h_measure_continuous,
    mollify,
    volume,
    weak_convergence_test,
)
from hma.principles import (
    LOOP_CONSTANT,
    NEAR_CONSTANT,
    SUITES,
    build_chain,
    run_suite,
    suite_oscillation,
    verify_perforated_comparison,
)
from hma.regions import Ball

from oracles import group_fd_horizontal, random_ball_points

SPEC64 = QuadratureSpec.finest(64)
KEYS = ("Xu", "Yu", "Ut", "XXu", "YYu", "XYu", "YXu")


# 1 -----------------------------------------------------------------------------------


def test_c1_algebraic_identities(criterion):
    rng = np.random.default_rng(1)
    n = 10_000
    start = time.perf_counter()
    a, b, c = (rng.uniform(-2, 2, size=(n, 3)) for _ in range(3))
    scale = 1.0 + np.abs(a).max() + np.abs(b).max() + np.abs(c).max()

    lhs = np.asarray(compose(compose(a, b), c))
    rhs = np.asarray(compose(a, compose(b, c)))
    assoc = np.max(np.abs(lhs - rhs)) / scale**2
    inv = max(np.max(np.abs(np.asarray(compose(a, inverse(a))))), np.max(np.abs(np.asarray(compose(inverse(a), a)))))
    ga = np.asarray(gauge(a))
    hom = max(float(np.max(np.abs(np.asarray(gauge(dilate(lam, a))) - lam * ga) / (lam * ga)))
              for lam in rng.uniform(0.1, 5.0, size=10))
    dab, dac, dcb = (np.asarray(distance(x, y)) for x, y in ((a, b), (a, c), (c, b)))
    tri = np.max((dab - (dac + dcb)) / (dac + dcb))
    comm = 0.0
    for u in jet_test_fields().values():
        pts = a[:, :] * 0.4
        pts = pts[u.in_domain(pts)]
        hj = horizontal_jet(u, pts)
        mag = 1.0 + np.abs(hj.XYu) + np.abs(hj.YXu) + 4 * np.abs(hj.Ut)
        comm = max(comm, float(np.max(np.abs(hj.XYu - hj.YXu + 4 * hj.Ut) / mag)))
    elapsed = time.perf_counter() - start

    ok = criterion(1, assoc <= 1e-12 and inv <= 1e-12 and hom <= 1e-12 and tri <= 1e-12 and comm <= 1e-12
                   and elapsed < 1.0,
                   f"assoc={assoc:.1e} inverse={inv:.1e} homogeneity={hom:.1e} triangle={tri:.1e} "
                   f"commutator={comm:.1e} time={elapsed:.2f}s")
    assert ok


# 2 -----------------------------------------------------------------------------------


def _jet_points(rng, u, name, n):
    singular = {"gauge": (0, 0, 0), "r": None, "cone@": (0.3, -0.2, 0.1), "gauge+0.1|z|^2": (0, 0, 0)}
    out = []
    while sum(len(o) for o in out) < n:
        q = rng.uniform((-0.8, -0.8, -0.6), (0.8, 0.8, 0.6), size=(2 * n, 3))
        c = singular.get(name)
        if c is not None:
            q = q[np.asarray(distance(q, c)) > 0.2]
        out.append(q[u.in_domain(q)])
    return np.concatenate(out)[:n]


def test_c2_jets_match_group_finite_differences(criterion):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    fields = jet_test_fields()
    worst, worst_at = 0.0, ""
    for name, u in fields.items():
        pts = _jet_points(rng, u, name, 1000)
        hj = horizontal_jet(u, pts)
        fd = group_fd_horizontal(u, pts, 1e-4)
        for k in KEYS:
            a = np.asarray(getattr(hj, k))
            err = float(np.max(np.abs(a - fd[k]) / np.maximum(1.0, np.abs(a))))
            if err > worst:
                worst, worst_at = err, f"{name}:{k}"
    elapsed = time.perf_counter() - start
    ok = criterion(2, len(fields) >= 12 and worst <= 1e-6 and elapsed < 5.0,
                   f"{len(fields)} fields x 1000 points, worst error {worst:.2e} ({worst_at}), time={elapsed:.2f}s")
    assert ok


# 3 -----------------------------------------------------------------------------------


def test_c3_radial_determinant_formula(criterion):
    rng = np.random.default_rng(3)
    p = rng.uniform(-1, 1, size=(20_000, 3))
    p = p[p[:, 0] ** 2 + p[:, 1] ** 2 >= 0.01]
    profiles = {"r": power(1), "r^2": power(2), "1-r": affine_profile(-1.0, 1.0), "exp(r)": exponential()}
    worst = 0.0
    for h in profiles.values():
        generic = horizontal_hessian(radial_field(h), p).det
        closed = radial_det_closed_form(h, p)
        worst = max(worst, float(np.max(np.abs(generic - closed) / np.abs(closed))))
    gauge_det = float(np.max(np.abs(horizontal_hessian(gauge_field(), p).det)))
    ok = criterion(3, worst <= 1e-10 and gauge_det <= 1e-9,
                   f"four profiles worst relative {worst:.1e}; |det H(gauge)| max {gauge_det:.1e}")
    assert ok


# 4 -----------------------------------------------------------------------------------


def test_c4_volume_scaling(criterion):
    radii = (0.5, 1.0, 2.0)
    spec = QuadratureSpec.finest(64)
    ratios = [volume(Ball((0, 0, 0), R), spec).value / R**4 for R in radii]
    spread = (max(ratios) - min(ratios)) / np.mean(ratios)
    s1, s2 = 0.9, 1.1
    v1, v2 = (volume(Ball((0, 0, 0), s), spec).value for s in (s1, s2))
    slope = math.log(v2 / v1) / math.log(s2 / s1)
    ok = criterion(4, spread <= 0.01 and abs(slope - 4.0) <= 0.05,
                   f"V(B_R)/R^4 = {ratios}, spread {spread:.1e}; log-log slope {slope:.4f}")
    assert ok


# 5 -----------------------------------------------------------------------------------


def test_c5_constants_two_routes(criterion):
    a, b = c1_polar(), c1_adaptive()
    rel_c1 = abs(a - b) / abs(b)
    x, y = alpha_tensor(), alpha_radial()
    rel_alpha = abs(x - y) / abs(y)
    ok = criterion(5, rel_c1 <= 1e-6 and rel_alpha <= 1e-6,
                   f"c1 {a!r} vs {b!r} (rel {rel_c1:.1e}); alpha {x!r} vs {y!r} (rel {rel_alpha:.1e})")
    assert ok


def test_c5_cone_side_matches_c1_m2(criterion):
    v = quartic_barrier(1.0, 0.5, -1.0)
    rep = verify_perforated_comparison(v, Ball((0, 0, 0), 1.0), SPEC64)
    d = rep.details
    ok = criterion(5, d["cone_vs_c1m2_within"] and rep.passed,
                   f"cone side {rep.lhs:.6f} vs c1 m^2 {d['c1_m2']:.6f}: gap {d['cone_vs_c1m2_gap']:.2e} "
                   f"<= 2 x {d['cone_indicator']:.2e}")
    assert ok


# 6 -----------------------------------------------------------------------------------

THEOREM_SUITES = ("comparison", "pointwise", "perforated", "nonpos", "chain-ineq", "abp", "weak-max",
                  "measure-comparison")


@pytest.fixture(scope="module")
def suite_runs():
    start = time.perf_counter()
    runs = {name: run_suite(name, SPEC64, seed=0) for name in THEOREM_SUITES}
    return runs, time.perf_counter() - start


@pytest.mark.parametrize("name", THEOREM_SUITES)
def test_c6_theorem_suite(name, suite_runs, criterion):
    reports = suite_runs[0][name]
    bad = [r.name for r in reports if not (r.status == "pass" and r.margin >= -r.quadrature_error)]
    ok = criterion(6, len(reports) >= 5 and not bad,
                   f"{name}: {len(reports)} instances, failures {bad}")
    assert ok


def test_c6_suite_runtime(suite_runs, criterion):
    elapsed = suite_runs[1]
    ok = criterion(6, elapsed <= 300.0, f"all theorem suites at resolution 64 in {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("name", THEOREM_SUITES)
def test_c6_broken_hypotheses_exit_as_hypothesis_failures(name, tmp_path, criterion):
    out = tmp_path / "report.json"
    code = cli.run(["verify", name, "--broken", "--resolution", "32", "--output", str(out)])
    statuses = {r["status"] for r in json.loads(out.read_text())["reports"]}
    ok = criterion(6, code == cli.EXIT_HYPOTHESIS and statuses == {"hypothesis_failed"},
                   f"{name} --broken: exit {code}, statuses {sorted(statuses)}")
    assert ok


# 7 -----------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def chains():
    rng = np.random.default_rng(7)
    return [build_chain(p, 1.0) for p in random_ball_points(rng, 1000)]


def test_c7_lambda_bounds(chains, criterion):
    worst = min(min(lam - max(b, lb) for lam, b, lb in zip(c.lambdas, c.lambda_bounds, c.ratio_bounds))
                for c in chains)
    ok = criterion(7, worst >= -1e-10, f"min over 1000 chains of lambda - bound: {worst:.3e}")
    assert ok


def test_c7_intermediate_gauges(chains, criterion):
    worst = 0.0
    for c in chains:
        if c.sigma is None:
            continue
        # the final loop visits xi_2, xi_3, xi_4 and returns to the origin
        for p, mult in zip(c.points[-4:-1], (17**0.25, 8**0.25, 1.0)):
            worst = max(worst, abs(gauge(p) - mult * c.sigma))
    ok = criterion(7, worst <= 1e-12, f"max |rho(xi_k) - c_k sigma| = {worst:.1e}")
    assert ok


def test_c7_far_case_closed_form(chains, criterion):
    far = [c for c in chains if c.case == "far"]
    rel_axis = max(abs(c.axis_factor - c.closed_form_factor) / c.closed_form_factor for c in far)
    rel_total = max(abs(c.total_factor - c.closed_form_factor) / c.closed_form_factor for c in far)
    ok = criterion(7, len(far) > 0 and min(rel_axis, rel_total) <= 1e-8,
                   f"{len(far)} far chains: closed form vs chain factor, max relative gap {rel_axis:.2e} "
                   f"(excluding the first step) / {rel_total:.2e} (full chain)")
    assert ok


# 8 -----------------------------------------------------------------------------------


def test_c8_single_oscillation_constant(criterion):
    base = suite_oscillation(SPEC64, seed=0)
    doubled = suite_oscillation(SPEC64, seed=0, doubled=True)
    constants = {r.details["C"] for r in base + doubled}
    worst = max(r.details["ratio"] or 0.0 for r in doubled)
    failing = [r.name for r in base + doubled if not r.passed]
    ok = criterion(8, len(base) >= 10 and len(doubled) >= 2 * len(base) and len(constants) == 1 and not failing,
                   f"C={constants}; {len(base)} fields and {len(doubled)} doubled, worst mu/osc^2 {worst:.3f}, "
                   f"failures {failing}")
    assert ok


# 9 -----------------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["x2+y2", "r"])
def test_c9_continuous_measure_matches_direct(name, criterion):
    u = {"x2+y2": horizontal_square(), "r": quartic_gauge()}[name]
    ball = Ball((0, 0, 0), 1.0)
    spec = QuadratureSpec.finest(32)
    direct = h_measure(u, ball, spec)
    cont = h_measure_continuous(u, ball, (0.2, 0.1), spec)
    gap = abs(direct.value - cont.value)
    ok = criterion(9, gap <= cont.error_indicator,
                   f"{name}: direct {direct.value:.6f} vs mollified {cont.value:.6f}, gap {gap:.2e} "
                   f"<= indicator {cont.error_indicator:.2e}")
    assert ok


def test_c9_weak_convergence_gaps_decrease(criterion):
    c, rad = (0.5, 0.0, 0.0), 0.3
    ball = Ball(c, rad)
    f = lambda p: np.maximum(0.0, 1.0 - np.asarray(distance(p, c)) / rad) ** 2
    u = gauge_field()
    seq = [mollify(u, h, ball, 8, 32) for h in (0.2, 0.1, 0.05)]
    rep = weak_convergence_test(seq, u, f, ball, QuadratureSpec.finest(32))
    ok = criterion(9, rep.monotone and rep.gaps[-1] < rep.gaps[0],
                   f"gauge mollified at h=0.2,0.1,0.05: gaps {[f'{g:.2e}' for g in rep.gaps]}")
    assert ok


# 10 ----------------------------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["verify", "comparison", "--resolution", "32", "--seed", "3"],
    ["verify", "measure-comparison", "--resolution", "16"],
    ["integrate", "--field", "gauge-ma", "--region", "ball:1", "--eps", "1e-3"],
    ["chain", "--x0", "0.1", "--y0", "0.2", "--t0", "0.7"],
], ids=["verify-comparison", "verify-measure", "integrate", "chain"])
def test_c10_cli_output_is_byte_identical(argv, python, cli_env, criterion):
    outputs = []
    for threads in ("1", "4", "1", "4"):
        env = dict(cli_env, HMA_THREADS=threads)
        res = subprocess.run([python, "-m", "hma.cli", *argv], env=env, capture_output=True, check=False)
        outputs.append((res.returncode, res.stdout))
    same = all(o == outputs[0] for o in outputs)
    ok = criterion(10, same and outputs[0][0] == 0 and len(outputs[0][1]) > 0,
                   f"{' '.join(argv[:2])}: 4 runs (HMA_THREADS=1,4,1,4) identical={same}")
    assert ok
