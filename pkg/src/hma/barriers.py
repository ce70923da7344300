"""Ready-made comparison functions: gauge cones, quartic and exponential barriers."""

from __future__ import annotations

import numpy as np

from .group import ORIGIN, Point
from .jets import (
    Jet,
    Profile,
    ScalarField,
    X_COORD,
    Y_COORD,
    field_from_jet,
    gauge_field,
    quartic_gauge,
)


class ConeFunction(ScalarField):
    """``m (d(xi, center)/R - 1)``; jets are undefined at the vertex."""

    def __init__(self, center, R: float, m: float):
        if m < 0:
            raise ValueError("cone height m must be nonnegative")
        if not R > 0:
            raise ValueError("cone radius must be positive")
        self.center = Point(*map(float, center))
        self.R = float(R)
        self.m = float(m)
        rho = gauge_field()
        if self.center != ORIGIN:
            rho = rho.translated(self.center)
        base = rho * (self.m / self.R) - self.m
        super().__init__(base._value, base._jet, base._domain, name=f"cone(m={m:g},R={R:g})")


def gauge_cone(center=ORIGIN, R: float = 1.0, m: float = 1.0) -> ConeFunction:
    return ConeFunction(center, R, m)


def quartic_coefficient(R: float, sigma: float, m0: float) -> float:
    return m0 / ((1.0 - sigma**4) * R**4)


def quartic_barrier(R: float, sigma: float, m0: float) -> ScalarField:
    """``m0 (R^4 - r) / ((1 - sigma^4) R^4)``: zero on the R-sphere, ``m0`` on the sigma R-sphere."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    if not R > 0:
        raise ValueError("R must be positive")
    if not m0 < 0:
        raise ValueError("m0 must be negative")
    a = quartic_coefficient(R, sigma, m0)
    f = (quartic_gauge() * (-a)) + a * R**4
    f.name = f"quartic(R={R:g},sigma={sigma:g},m0={m0:g})"
    return f


def quartic_barrier_det(R: float, sigma: float, m0: float, p) -> np.ndarray:
    """Closed-form ``det H = 144 (x^2+y^2)^2 a^2`` of the quartic barrier."""
    p = np.asarray(p, dtype=float)
    a = quartic_coefficient(R, sigma, m0)
    w = p[..., 0] ** 2 + p[..., 1] ** 2
    return 144.0 * w * w * a * a


def exp_barrier(lam: float, M: float) -> ScalarField:
    """``M - e^{lam x} - e^{lam y}``: positive where ``M`` dominates, ``L w < 0`` for any PSD ``a``.

    ``X^2 w = -lam^2 e^{lam x}``, ``Y^2 w = -lam^2 e^{lam y}`` and ``XY w = YX w = 0``.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    ex = Profile(lambda a: np.exp(lam * a), lambda a: lam * np.exp(lam * a),
                 lambda a: lam * lam * np.exp(lam * a), name=f"exp({lam:g}.)")
    f = (X_COORD.apply(ex) + Y_COORD.apply(ex)) * -1.0 + M
    f.name = f"exp_barrier(lam={lam:g},M={M:g})"
    return f


def epsilon_perturb(u: ScalarField, eps: float) -> ScalarField:
    """``u + eps (x^2 + y^2)``; adds ``2 eps I`` to the horizontal Hessian."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    f = u + horizontal_square() * eps
    f.name = f"({u.name}+{eps:g}|z|^2)"
    return f


def _w_jet(p):
    x, y = p[:, 0], p[:, 1]
    z = np.zeros_like(x)
    two = np.full_like(x, 2.0)
    return Jet(x * x + y * y, np.stack([2.0 * x, 2.0 * y, z]), np.stack([two, z, z, two, z, z]))


def horizontal_square() -> ScalarField:
    """``x^2 + y^2``."""
    return field_from_jet(_w_jet, name="|z|^2")
