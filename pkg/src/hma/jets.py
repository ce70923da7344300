"""Second-order jets of scalar fields and the horizontal calculus built on them.

A :class:`Jet` carries value, Euclidean gradient and the six independent
entries of the Euclidean Hessian at a batch of points, ordered
``xx, xy, xt, yy, yt, tt``.  Sums, products and composition with smooth
profiles propagate these exactly (truncated Taylor arithmetic), so the
horizontal quantities ``Xu, Yu, X^2u, ...`` come out at full floating-point
accuracy instead of through finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .group import compose, inverse

# index of (i, j) in the packed symmetric storage
_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_PACK = {(i, j): k for k, (i, j) in enumerate(_PAIRS)}
_PACK.update({(j, i): k for (i, j), k in list(_PACK.items())})


class DomainError(ValueError):
    """A derivative was requested outside a field's declared domain."""


class NotSmoothError(TypeError):
    """A derivative was requested from a field that only defines values."""


def _points(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError(f"points must have trailing dimension 3, got shape {p.shape}")
    return p


class Jet:
    """Value, gradient (3, ...) and packed Hessian (6, ...) at a batch of points."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @classmethod
    def constant(cls, c: float, shape) -> "Jet":
        return cls(np.full(shape, float(c)), np.zeros((3,) + tuple(shape)), np.zeros((6,) + tuple(shape)))

    @classmethod
    def coordinate(cls, i: int, pts: np.ndarray) -> "Jet":
        shape = pts.shape[:-1]
        grad = np.zeros((3,) + shape)
        grad[i] = 1.0
        return cls(pts[..., i].copy(), grad, np.zeros((6,) + shape))

    def hessian_matrix(self) -> np.ndarray:
        """Full symmetric Hessian with shape (3, 3, ...)."""
        return np.stack([np.stack([self.hess[_PACK[i, j]] for j in range(3)]) for i in range(3)])

    # arithmetic -----------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return Jet(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value * other, self.grad * other, self.hess * other)
        a, b = self, other
        cross = np.stack([a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] for i, j in _PAIRS])
        return Jet(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            a.value * b.hess + b.value * a.hess + cross,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.apply(*_reciprocal(other.value))
        return self * (1.0 / other)

    def apply(self, f0, f1, f2) -> "Jet":
        """Chain rule for ``phi(self)`` given phi, phi', phi'' evaluated at ``self.value``."""
        g = self.grad
        outer = np.stack([g[i] * g[j] for i, j in _PAIRS])
        return Jet(f0, f1 * g, f2 * outer + f1 * self.hess)

    def pullback(self, jac: np.ndarray) -> "Jet":
        """Jet of ``u(A p + b)`` given the jet of ``u`` at ``A p + b`` (``jac`` = A)."""
        jac = np.asarray(jac, dtype=float)
        grad = np.einsum("ki,k...->i...", jac, self.grad)
        full = np.einsum("ki,kl...,lj->ij...", jac, self.hessian_matrix(), jac)
        return Jet(self.value, grad, np.stack([full[i, j] for i, j in _PAIRS]))


def _reciprocal(a):
    return 1.0 / a, -1.0 / a**2, 2.0 / a**3


def compose2(a: Jet, b: Jet, f, fa, fb, faa, fab, fbb) -> Jet:
    """Jet of ``F(a, b)`` from the 2-jet of ``F`` at ``(a.value, b.value)``."""
    ga, gb = a.grad, b.grad
    quad = np.stack(
        [
            faa * ga[i] * ga[j] + fab * (ga[i] * gb[j] + ga[j] * gb[i]) + fbb * gb[i] * gb[j]
            for i, j in _PAIRS
        ]
    )
    return Jet(f, fa * ga + fb * gb, fa * a.hess + fb * b.hess + quad)


# profiles ---------------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """A smooth scalar function with its first two derivatives.

    ``domain`` (optional) marks where the derivatives exist; jets requested at
    arguments outside it raise :class:`DomainError`.
    """

    f: Callable
    df: Callable
    d2f: Callable
    name: str = "profile"
    domain: Optional[Callable] = None

    def __call__(self, a):
        return self.f(a)

    def derivatives(self, a):
        if self.domain is not None:
            ok = self.domain(a)
            if not np.all(ok):
                raise DomainError(f"{self.name}: derivative requested at a singular argument")
        return self.f(a), self.df(a), self.d2f(a)


def power(p: float) -> Profile:
    p = float(p)
    if p >= 0 and p == int(p):
        k = int(p)
        return Profile(
            lambda a: a**k,
            lambda a: k * a ** max(k - 1, 0) if k >= 1 else np.zeros_like(a),
            lambda a: k * (k - 1) * a ** max(k - 2, 0) if k >= 2 else np.zeros_like(a),
            name=f"a**{k}",
        )
    with_domain = (lambda a: a > 0) if p < 2 else (lambda a: a >= 0)
    return Profile(
        lambda a: np.power(a, p),
        lambda a: p * np.power(a, p - 1),
        lambda a: p * (p - 1) * np.power(a, p - 2),
        name=f"a**{p:g}",
        domain=with_domain,
    )


def exponential(k: float = 1.0) -> Profile:
    return Profile(
        lambda a: np.exp(k * a),
        lambda a: k * np.exp(k * a),
        lambda a: k * k * np.exp(k * a),
        name=f"exp({k:g}a)",
    )


def affine_profile(slope: float, intercept: float = 0.0) -> Profile:
    return Profile(
        lambda a: slope * a + intercept,
        lambda a: np.full_like(a, slope, dtype=float),
        lambda a: np.zeros_like(a, dtype=float),
        name=f"{slope:g}a+{intercept:g}",
    )


# fields -------------------------------------------------------------------------


class ScalarField:
    """A function on (a subset of) H^1 evaluable as values and, if smooth, as jets.

    ``value`` and ``jet`` take flat ``(N, 3)`` arrays.  ``domain`` returns a
    boolean mask of points where jets are defined.
    """

    def __init__(self, value, jet=None, domain=None, name: str = "field"):
        self._value = value
        self._jet = jet
        self._domain = domain
        self.name = name

    @property
    def smooth(self) -> bool:
        return self._jet is not None

    def __repr__(self):
        return f"ScalarField({self.name})"

    def __call__(self, p):
        p = _points(p)
        flat = p.reshape(-1, 3)
        v = np.asarray(self._value(flat), dtype=float).reshape(p.shape[:-1])
        return float(v) if v.ndim == 0 else v

    def in_domain(self, p) -> np.ndarray:
        p = _points(p)
        flat = p.reshape(-1, 3)
        if self._domain is None:
            return np.ones(p.shape[:-1], dtype=bool)
        return np.asarray(self._domain(flat), dtype=bool).reshape(p.shape[:-1])

    def jet(self, p) -> Jet:
        if self._jet is None:
            raise NotSmoothError(f"{self.name} is only continuous; derivatives are undefined")
        p = _points(p)
        flat = p.reshape(-1, 3)
        if self._domain is not None and not np.all(self._domain(flat)):
            raise DomainError(f"{self.name}: point outside the declared domain")
        j = self._jet(flat)
        shape = p.shape[:-1]
        return Jet(j.value.reshape(shape), j.grad.reshape((3,) + shape), j.hess.reshape((6,) + shape))

    def horizontal(self, p) -> "HorizontalJet":
        return horizontal_jet(self, p)

    # algebra -------------------------------------------------------------------------
    def _binary(self, other, op, name):
        if isinstance(other, ScalarField):
            jet = None
            if self.smooth and other.smooth:
                jet = lambda p, a=self._jet, b=other._jet: op(a(p), b(p))
            return ScalarField(
                lambda p, a=self._value, b=other._value: op(a(p), b(p)),
                jet,
                _and_domain(self._domain, other._domain),
                name=f"({self.name}{name}{other.name})",
            )
        c = float(other)
        jet = (lambda p, a=self._jet: op(a(p), c)) if self.smooth else None
        return ScalarField(lambda p, a=self._value: op(a(p), c), jet, self._domain,
                           name=f"({self.name}{name}{c:g})")

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, "+")

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, "-")

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b, "*")

    def __rmul__(self, other):
        return self * other

    def __neg__(self):
        return self * -1.0

    def apply(self, prof: Profile) -> "ScalarField":
        """The field ``prof(self)``."""
        inner_v, inner_j = self._value, self._jet

        def value(p):
            return prof.f(inner_v(p))

        jet = None
        if self.smooth:
            def jet(p):
                j = inner_j(p)
                return j.apply(*prof.derivatives(j.value))

        domain = self._domain
        if prof.domain is not None:
            def domain(p, d=self._domain):
                ok = prof.domain(inner_v(p))
                return ok if d is None else ok & d(p)

        return ScalarField(value, jet, domain, name=f"{prof.name}[{self.name}]")

    def translated(self, center) -> "ScalarField":
        """Left translate ``p -> u(center^{-1} ∘ p)``; preserves H-convexity."""
        c = np.asarray(center, dtype=float)
        ci = np.asarray(inverse(c))
        # Jacobian of p -> c^{-1} ∘ p
        jac = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0 * ci[1], -2.0 * ci[0], 1.0]])
        inner_v, inner_j, dom = self._value, self._jet, self._domain

        def shift(p):
            return np.asarray(compose(ci, p)).reshape(-1, 3)

        jet = (lambda p: inner_j(shift(p)).pullback(jac)) if self.smooth else None
        domain = (lambda p: dom(shift(p))) if dom is not None else None
        return ScalarField(lambda p: inner_v(shift(p)), jet, domain, name=f"{self.name}@({c[0]:g},{c[1]:g},{c[2]:g})")

    def dilated(self, s: float) -> "ScalarField":
        """``p -> u(delta_s p)``; preserves H-convexity and scales ``H`` by ``s^2``."""
        if not s > 0:
            raise ValueError("dilation factor must be positive")
        scale = np.array([s, s, s * s])
        jac = np.diag(scale)
        inner_v, inner_j, dom = self._value, self._jet, self._domain
        jet = (lambda p: inner_j(p * scale).pullback(jac)) if self.smooth else None
        domain = (lambda p: dom(p * scale)) if dom is not None else None
        return ScalarField(lambda p: inner_v(p * scale), jet, domain, name=f"{self.name}(delta_{s:g})")


def _and_domain(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return lambda p: a(p) & b(p)


def coordinate(i: int) -> ScalarField:
    name = "xyt"[i]
    return ScalarField(lambda p: p[:, i], lambda p: Jet.coordinate(i, p), name=name)


def constant(c: float) -> ScalarField:
    c = float(c)
    return ScalarField(lambda p: np.full(p.shape[0], c), lambda p: Jet.constant(c, p.shape[:1]), name=f"{c:g}")


X_COORD = coordinate(0)
Y_COORD = coordinate(1)
T_COORD = coordinate(2)


def field_from_jet(jet_fn, name="field", domain=None) -> ScalarField:
    """Wrap a jet function (flat points -> Jet) as a field."""
    return ScalarField(lambda p: jet_fn(p).value, jet_fn, domain, name=name)


def _r_jet(p):
    x, y, t = p[:, 0], p[:, 1], p[:, 2]
    w = x * x + y * y
    value = w * w + t * t
    grad = np.stack([4.0 * x * w, 4.0 * y * w, 2.0 * t])
    z = np.zeros_like(x)
    hess = np.stack([4.0 * w + 8.0 * x * x, 8.0 * x * y, z, 4.0 * w + 8.0 * y * y, z, np.full_like(x, 2.0)])
    return Jet(value, grad, hess)


def quartic_gauge() -> ScalarField:
    """``r = (x^2+y^2)^2 + t^2``, the fourth power of the gauge."""
    return field_from_jet(_r_jet, name="r")


def radial_field(h: Profile) -> ScalarField:
    """``u = h(r)`` with ``r = (x^2+y^2)^2 + t^2``."""
    return quartic_gauge().apply(h)


def gauge_field() -> ScalarField:
    """The gauge ``rho = r^{1/4}``; jets are undefined at the origin."""
    f = radial_field(power(0.25))
    f.name = "rho"
    return f


def radial_det_closed_form(h: Profile, p) -> np.ndarray:
    """``48 (x^2+y^2)^2 {4 r h'' + 3 h'} h'`` for ``u = h(r)``."""
    p = _points(p)
    w = p[..., 0] ** 2 + p[..., 1] ** 2
    r = w * w + p[..., 2] ** 2
    _, d1, d2 = h.derivatives(r)
    return 48.0 * w * w * (4.0 * r * d2 + 3.0 * d1) * d1


# horizontal calculus ------------------------------------------------------------


@dataclass(frozen=True)
class HorizontalHessian:
    """Symmetric 2x2 matrix ``[[h11, h12], [h12, h22]]`` (entries may be arrays)."""

    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    @property
    def det(self):
        return self.h11 * self.h22 - self.h12 * self.h12

    @property
    def trace(self):
        return self.h11 + self.h22

    @property
    def min_eigenvalue(self):
        half = 0.5 * (self.h11 - self.h22)
        return 0.5 * (self.h11 + self.h22) - np.hypot(half, self.h12)

    def adjoint(self) -> "HorizontalHessian":
        return HorizontalHessian(self.h22, -self.h12, self.h11)

    def matrix(self) -> np.ndarray:
        return np.stack(
            [np.stack([self.h11, self.h12], -1), np.stack([self.h12, self.h22], -1)], -2
        )

    def __add__(self, other):
        return HorizontalHessian(self.h11 + other.h11, self.h12 + other.h12, self.h22 + other.h22)


def trace_product(a: HorizontalHessian, b: HorizontalHessian):
    """``trace(a b)`` for symmetric a, b."""
    return a.h11 * b.h11 + 2.0 * a.h12 * b.h12 + a.h22 * b.h22


@dataclass(frozen=True)
class HorizontalJet:
    Xu: np.ndarray
    Yu: np.ndarray
    Ut: np.ndarray
    XXu: np.ndarray
    YYu: np.ndarray
    XYu: np.ndarray
    YXu: np.ndarray

    def hessian_c(self, c: float) -> np.ndarray:
        """``[[X^2u, XYu + c u_t], [YXu - c u_t, Y^2u]]`` with shape (..., 2, 2)."""
        top = np.stack(np.broadcast_arrays(self.XXu, self.XYu + c * self.Ut), -1)
        bot = np.stack(np.broadcast_arrays(self.YXu - c * self.Ut, self.YYu), -1)
        return np.stack([top, bot], -2)

    def hessian(self) -> HorizontalHessian:
        return HorizontalHessian(self.XXu, 0.5 * (self.XYu + self.YXu), self.YYu)


def horizontal_from_jet(j: Jet, p) -> HorizontalJet:
    p = _points(p)
    x, y = p[..., 0], p[..., 1]
    ux, uy, ut = j.grad
    hxx, hxy, hxt, hyy, hyt, htt = j.hess
    common = hxy - 2.0 * x * hxt + 2.0 * y * hyt - 4.0 * x * y * htt
    return HorizontalJet(
        Xu=ux + 2.0 * y * ut,
        Yu=uy - 2.0 * x * ut,
        Ut=ut,
        XXu=hxx + 4.0 * y * hxt + 4.0 * y * y * htt,
        YYu=hyy - 4.0 * x * hyt + 4.0 * x * x * htt,
        XYu=common - 2.0 * ut,
        YXu=common + 2.0 * ut,
    )


def horizontal_jet(u: ScalarField, p) -> HorizontalJet:
    return horizontal_from_jet(u.jet(p), p)


def horizontal_hessian(u: ScalarField, p) -> HorizontalHessian:
    return horizontal_jet(u, p).hessian()


def horizontal_hessian_c(u: ScalarField, p, c: float) -> np.ndarray:
    return horizontal_jet(u, p).hessian_c(c)


def adjoint_hessian(u: ScalarField, p) -> HorizontalHessian:
    return horizontal_hessian(u, p).adjoint()


def kohn_laplacian(u: ScalarField, p):
    hj = horizontal_jet(u, p)
    return hj.XXu + hj.YYu


def ma_density(u: ScalarField, p):
    """Monge-Ampere density ``det H(u) + 12 u_t^2``."""
    hj = horizontal_jet(u, p)
    return hj.hessian().det + 12.0 * hj.Ut**2


def ma_parts(u: ScalarField, p):
    """``(det H(u), trace H(u), u_t)`` from a single jet evaluation."""
    hj = horizontal_jet(u, p)
    h = hj.hessian()
    return h.det, h.trace, hj.Ut


# finite-difference and grid-backed fields ----------------------------------------


def finite_difference_jet(func, p: np.ndarray, step: float) -> Jet:
    """Central-difference jet of a black-box vectorized function at flat points ``p``."""
    p = _points(p).reshape(-1, 3)
    e = np.eye(3) * step
    f0 = func(p)
    grad = np.stack([(func(p + e[i]) - func(p - e[i])) / (2.0 * step) for i in range(3)])
    hess = []
    for i, j in _PAIRS:
        if i == j:
            hess.append((func(p + e[i]) - 2.0 * f0 + func(p - e[i])) / step**2)
        else:
            hess.append(
                (func(p + e[i] + e[j]) - func(p + e[i] - e[j]) - func(p - e[i] + e[j]) + func(p - e[i] - e[j]))
                / (4.0 * step**2)
            )
    return Jet(f0, grad, np.stack(hess))


def finite_difference_field(func, step: float = 1e-4, name: str = "fd") -> ScalarField:
    """Field whose jets come from central differences of ``func`` (flat points -> values)."""
    return ScalarField(func, lambda p: finite_difference_jet(func, p, step), name=name)


def _second_derivative(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second derivative along ``axis``: 3-point centred inside, 4-point one-sided at the ends."""
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h**2
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / h**2
    return np.moveaxis(out, 0, axis)


class GridField(ScalarField):
    """Field sampled on a regular node grid; derivatives by second-order differences.

    Jets at arbitrary points are trilinear interpolants of the node values,
    gradients and Hessian entries.
    """

    def __init__(self, values: np.ndarray, lo, hi, name: str = "grid"):
        values = np.asarray(values, dtype=float)
        if values.ndim != 3 or min(values.shape) < 4:
            raise ValueError("grid needs at least 4 nodes per axis")
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.shape = values.shape
        self.spacing = (self.hi - self.lo) / (np.array(values.shape) - 1)
        h = self.spacing
        grads = [np.gradient(values, h[i], axis=i, edge_order=2) for i in range(3)]
        hess = []
        for i, j in _PAIRS:
            if i == j:
                hess.append(_second_derivative(values, h[i], i))
            else:
                hess.append(np.gradient(grads[i], h[j], axis=j, edge_order=2))
        self._stack = np.ascontiguousarray(np.stack([values] + grads + hess))
        self._inv_h = 1.0 / h
        super().__init__(self._grid_value, self._grid_jet, self._grid_domain, name=name)

    def nodes(self) -> np.ndarray:
        axes = [np.linspace(self.lo[i], self.hi[i], self.shape[i]) for i in range(3)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), -1)

    def _grid_domain(self, p):
        slack = 1e-12 * (1.0 + np.abs(self.hi - self.lo))
        return np.all((p >= self.lo - slack) & (p <= self.hi + slack), axis=-1)

    def _interp(self, p, rows):
        if not np.all(self._grid_domain(p)):
            raise DomainError(f"{self.name}: point outside the sampled grid")
        return _kernels.trilinear(self._stack[rows], self.lo, self._inv_h, np.ascontiguousarray(p))

    def _grid_value(self, p):
        return self._interp(p, slice(0, 1))[0]

    def _grid_jet(self, p):
        out = self._interp(p, slice(None))
        return Jet(out[0], out[1:4], out[4:10])


def sym_index(i: int, j: int) -> int:
    return _PACK[i, j]


SQRT2 = math.sqrt(2.0)
