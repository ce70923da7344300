import math

import numpy as np
import pytest

from hma.barriers import horizontal_square, quartic_barrier, quartic_coefficient
from hma.convexity import check_psd
from hma.jets import T_COORD, X_COORD, constant, gauge_field, quartic_gauge
from hma.measure import (
    MeasureEstimate,
    QuadratureSpec,
    c1_adaptive,
    c1_polar,
    export_csv,
    h_measure,
    h_measure_continuous,
    integrate,
    kernel_nodes,
    mollify,
    oscillation_constant,
    trace_constant,
    trace_density_fn,
    volume,
    weak_convergence_test,
    weighted_h_measure,
)
from hma.regions import Annulus, Ball, Box, parse_region

C1 = 1.5 * math.pi**2
UNIT = Ball((0, 0, 0), 1.0)


def test_box_volume_is_exact():
    assert volume(Box((0, 0, 0), (1, 2, 3)), QuadratureSpec(8, 2)).value == pytest.approx(6.0, rel=1e-14)


def test_ball_volume():
    est = volume(UNIT, QuadratureSpec.finest(96))
    assert abs(est.value - math.pi**2 / 2) <= max(3 * est.error_indicator, 1e-2)


def test_ball_volume_is_translation_invariant():
    spec = QuadratureSpec.finest(48)
    a = volume(UNIT, spec).value
    b = volume(Ball((0.7, -0.3, 0.4), 1.0), spec).value
    assert b == pytest.approx(a, rel=1e-12)


def test_annulus_volume():
    spec = QuadratureSpec.finest(64)
    ann = volume(Annulus((0, 0, 0), 0.5, 1.0), spec).value
    full = volume(UNIT, spec).value
    assert ann == pytest.approx(full * (1 - 0.5**4), rel=2e-2)


def test_horizontal_square_measure_on_box():
    # det = 4 and u_t = 0, so mu is 4 times the volume
    assert h_measure(horizontal_square(), Box((0, 0, 0), (1, 1, 1)), QuadratureSpec(8, 2)).value == pytest.approx(4.0)


def test_linear_field_has_zero_measure():
    assert h_measure(X_COORD * 3.0 + 1.0, UNIT, QuadratureSpec(8, 2)).value == 0.0


def test_gauge_measure_with_exclusion_approaches_c1():
    vals = []
    for eps in (0.2, 0.1):
        spec = QuadratureSpec(32, 2, eps)
        vals.append(h_measure(gauge_field(), UNIT, spec).value)
    assert abs(vals[-1] - C1) < abs(vals[0] - C1) + 0.05
    assert vals[-1] == pytest.approx(C1, rel=5e-2)


def test_c1_two_routes():
    assert c1_polar() == pytest.approx(C1, rel=1e-10)
    assert c1_adaptive() == pytest.approx(C1, rel=1e-9)


def test_quartic_barrier_mass_closed_form():
    # det + 12 u_t^2 = a^2 (144 w^2 + 48 t^2) integrates to 24 pi^2 a^2 R^8
    R, sigma, m0 = 1.0, 0.5, -1.0
    a = quartic_coefficient(R, sigma, m0)
    est = h_measure(quartic_barrier(R, sigma, m0), Ball((0, 0, 0), R), QuadratureSpec.finest(96))
    assert est.value == pytest.approx(24 * math.pi**2 * a * a * R**8, rel=1e-2)


def test_trace_density():
    est = integrate(trace_density_fn(horizontal_square()), Box((0, 0, 0), (1, 1, 1)), QuadratureSpec(8, 2))
    assert est.value == pytest.approx(4.0)


def test_weighted_measure_zero_weight():
    est = weighted_h_measure(gauge_field(), lambda p: np.zeros(p.shape[0]), UNIT, QuadratureSpec(8, 2))
    assert est.value == 0.0


def test_estimate_serialization():
    est = MeasureEstimate(1.5, 0.01, 8)
    assert est.to_dict() == {"value": 1.5, "error_indicator": 0.01, "cells": 8}
    assert '"value": 1.5' in est.to_json()


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(4, 2)
    with pytest.raises(ValueError):
        QuadratureSpec(16, 1)
    with pytest.raises(ValueError):
        QuadratureSpec(16, 2, -0.1)
    with pytest.raises(ValueError):
        QuadratureSpec.finest(33)
    assert QuadratureSpec.finest(64).resolutions == [32, 64]
    assert QuadratureSpec(16, 3).resolutions == [16, 32, 64]


def test_exclusion_larger_than_region_rejected():
    with pytest.raises(ValueError):
        volume(UNIT, QuadratureSpec(8, 2, 1.5))


def test_non_finite_density_raises():
    with pytest.raises(FloatingPointError):
        integrate(lambda p: np.full(p.shape[0], np.nan), UNIT, QuadratureSpec(8, 2))


def test_thread_count_does_not_change_results(monkeypatch):
    spec = QuadratureSpec(16, 2)
    monkeypatch.setenv("HMA_THREADS", "1")
    a = h_measure(gauge_field(), Annulus((0, 0, 0), 0.2, 1.0), spec)
    monkeypatch.setenv("HMA_THREADS", "4")
    b = h_measure(gauge_field(), Annulus((0, 0, 0), 0.2, 1.0), spec)
    assert a == b


# mollification --------------------------------------------------------------------


def test_kernel_weights_normalized():
    q, w = kernel_nodes(0.3, 8)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    assert np.all(w > 0) and q.shape == (w.size, 3)
    with pytest.raises(ValueError):
        kernel_nodes(0.3, 1)


def test_mollify_constant_and_affine_in_x():
    region = Ball((0, 0, 0), 0.5)
    c = mollify(constant(2.5), 0.2, region, grid_resolution=8)
    p = region.sample_interior(50)
    assert np.allclose(c(p), 2.5, rtol=1e-13)
    # the symmetric kernel has mean zero, so x is reproduced exactly
    m = mollify(X_COORD, 0.2, region, grid_resolution=12)
    assert np.allclose(m(p), p[:, 0], atol=1e-12)


def test_mollify_keeps_convexity():
    region = Ball((0, 0, 0), 0.6)
    uh = mollify(gauge_field(), 0.2, region, grid_resolution=16)
    assert check_psd(uh, region, 256, tol=1e-6).convex


def test_mollified_gauge_approaches_gauge():
    region = Ball((0, 0, 0), 0.6)
    p = region.sample_interior(200, seed=1)
    sup = [np.max(np.abs(mollify(gauge_field(), h, region, grid_resolution=24)(p) - gauge_field()(p)))
           for h in (0.4, 0.2, 0.1)]
    assert sup[0] > sup[1] > sup[2]


def test_mollify_rejects_bad_radius():
    with pytest.raises(ValueError):
        mollify(gauge_field(), 0.0, UNIT)


def test_continuous_measure_of_smooth_field():
    region = Ball((0, 0, 0), 0.5)
    spec = QuadratureSpec(16, 2)
    u = horizontal_square() + T_COORD
    direct = h_measure(u, region, spec).value
    cont = h_measure_continuous(u, region, (0.2, 0.1), spec, grid_resolution=24)
    assert abs(cont.value - direct) <= cont.error_indicator + 0.05 * direct
    with pytest.raises(ValueError):
        h_measure_continuous(u, region, (0.1, 0.2), spec)


def test_weak_convergence_trivial_sequences():
    region = Ball((0, 0, 0), 0.8)
    spec = QuadratureSpec(16, 2)
    f = lambda p: np.ones(p.shape[0])
    u = quartic_gauge()
    shifts = weak_convergence_test([u + 1.0 / k for k in (1, 2, 4)], u, f, region, spec, tol=1e-12)
    assert shifts.passed and max(shifts.gaps) <= 1e-9
    ks = (1, 2, 4, 8, 1024)
    scaled = weak_convergence_test([u * (1 + 1.0 / k) for k in ks], u, f, region, spec, tol=0.1)
    # the measure is quadratic in u, so the gaps are ((1 + 1/k)^2 - 1) times the limit
    assert scaled.monotone and scaled.passed
    assert np.allclose(scaled.gaps, [((1 + 1.0 / k) ** 2 - 1) * scaled.limit for k in ks], rtol=1e-10)
    assert scaled.to_dict()["limit"] == scaled.limit


# constants and export ----------------------------------------------------------------


def test_oscillation_constants():
    assert oscillation_constant(0.5) == pytest.approx(24 * math.pi**2 / (1 - 0.5**4) ** 2)
    assert trace_constant(0.5) == pytest.approx(16 * math.pi / (1 - 0.5**4))
    for f in (oscillation_constant, trace_constant):
        with pytest.raises(ValueError):
            f(1.0)
        with pytest.raises(ValueError):
            f(0.0)


def test_export_csv(tmp_path):
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])
    path = tmp_path / "out.csv"
    export_csv(horizontal_square(), pts, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,t,value"
    assert [float(v) for v in lines[2].split(",")] == [1.0, 2.0, 3.0, 5.0]


@pytest.mark.parametrize(
    "text,expected",
    [
        ("ball:2", Ball((0, 0, 0), 2.0)),
        ("ball:1:0.5,0,0.1", Ball((0.5, 0, 0.1), 1.0)),
        ("annulus:0.2,1", Annulus((0, 0, 0), 0.2, 1.0)),
        ("box:0,0,0,1,1,1", Box((0, 0, 0), (1, 1, 1))),
    ],
)
def test_parse_region(text, expected):
    assert parse_region(text) == expected


@pytest.mark.parametrize("text", ["ball", "ball:x", "annulus:1", "box:0,0,0,1,1", "cube:1", "ball:-1"])
def test_parse_region_errors(text):
    with pytest.raises(ValueError):
        parse_region(text)
