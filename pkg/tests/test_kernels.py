import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hma import _kernels
from hma._kernels import python_kernels as py

compiled = _kernels.compiled_kernels
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")
XS, WS = np.polynomial.legendre.leggauss(32)


def reference_pairwise(a):
    a = list(map(float, a))
    if not a:
        return 0.0
    while len(a) > 1:
        if len(a) % 2:
            a.append(0.0)
        a = [a[i] + a[i + 1] for i in range(0, len(a), 2)]
    return a[0]


@pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 8, 1023, 1025])
def test_pairwise_sum_matches_tree(n):
    a = np.random.default_rng(n).normal(size=n)
    assert py.pairwise_sum(a) == reference_pairwise(a)


def test_fh_core_outside_band_is_half_abs():
    d = np.array([-3.0, -1.5, 1.5, 3.0])
    g0, g1, g2 = py.fh_core(d, XS, WS)
    assert np.array_equal(g0, 0.5 * np.abs(d))
    assert np.array_equal(g1, 0.5 * np.sign(d)) and np.all(g2 == 0)


def test_fh_core_is_even_with_odd_slope():
    d = np.linspace(0.01, 1.4, 50)
    a0, a1, a2 = py.fh_core(d, XS, WS)
    b0, b1, b2 = py.fh_core(-d, XS, WS)
    assert np.allclose(a0, b0, rtol=1e-12) and np.allclose(a1, -b1, rtol=1e-12) and np.allclose(a2, b2, rtol=1e-12)


def test_fh_core_derivatives_consistent():
    d, e = np.linspace(-1.3, 1.3, 41), 1e-5
    g0, g1, g2 = py.fh_core(d, XS, WS)
    p0, p1, _ = py.fh_core(d + e, XS, WS)
    m0, m1, _ = py.fh_core(d - e, XS, WS)
    assert np.allclose(g1, (p0 - m0) / (2 * e), atol=1e-7)
    assert np.allclose(g2, (p1 - m1) / (2 * e), atol=1e-6)


def test_trilinear_exact_on_affine():
    n = 5
    ax = np.linspace(0, 1, n)
    X, Y, T = np.meshgrid(ax, ax, ax, indexing="ij")
    stack = np.stack([1 + 2 * X - Y + 3 * T, X * 0 + 4.0])
    pts = np.random.default_rng(0).uniform(0, 1, (30, 3))
    out = py.trilinear(stack, np.zeros(3), np.full(3, n - 1.0), pts)
    assert out.shape == (2, 30)
    assert np.allclose(out[0], 1 + 2 * pts[:, 0] - pts[:, 1] + 3 * pts[:, 2], rtol=1e-13)
    assert np.allclose(out[1], 4.0)


@needs_ext
@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(0, 300), elements=st.floats(-1e6, 1e6)))
def test_backends_agree_on_pairwise_sum(a):
    assert compiled.pairwise_sum(a) == py.pairwise_sum(a)


@needs_ext
def test_backends_agree_on_fh_core_and_bump_mass():
    d = np.random.default_rng(1).uniform(-2, 2, 500)
    for a, b in zip(py.fh_core(d, XS, WS), compiled.fh_core(d, XS, WS)):
        assert np.allclose(a, b, rtol=1e-13, atol=1e-15)
    assert compiled.bump_mass(XS, WS) == pytest.approx(py.bump_mass(XS, WS), rel=1e-14)


@needs_ext
def test_backends_agree_on_trilinear():
    rng = np.random.default_rng(2)
    stack = rng.normal(size=(4, 6, 7, 8))
    lo, inv_h = np.array([-1.0, -1.0, -0.5]), np.array([2.5, 3.0, 7.0])
    pts = rng.uniform((-1.1, -1.1, -0.6), (1.1, 1.1, 0.6), (200, 3))
    assert np.allclose(py.trilinear(stack, lo, inv_h, pts), compiled.trilinear(stack, lo, inv_h, pts),
                       rtol=1e-13, atol=1e-14)


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, HMA_PURE_PYTHON="1")
    code = "from hma import BACKEND; from hma.convexity import alpha_tensor; print(BACKEND, repr(alpha_tensor()))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, alpha = out.stdout.split()
    assert backend == "python"
    assert float(alpha) == pytest.approx(0.21281295411315349, rel=1e-6)


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")
    if compiled is not None and not os.environ.get("HMA_PURE_PYTHON"):
        assert _kernels.BACKEND == "cython"


def test_bump_mass_positive():
    assert math.isfinite(py.bump_mass(XS, WS)) and py.bump_mass(XS, WS) > 0
