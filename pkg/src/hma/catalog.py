"""Named test fields used by the suites, the tests and the CLI."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .barriers import epsilon_perturb, exp_barrier, gauge_cone, horizontal_square, quartic_barrier
from .convexity import convex_compose, mollified_max_function
from .jets import (
    T_COORD,
    X_COORD,
    Y_COORD,
    Profile,
    ScalarField,
    constant,
    exponential,
    gauge_field,
    power,
    quartic_gauge,
    radial_field,
)

_cos = Profile(np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a), name="cos")


def _named(f: ScalarField, name: str) -> ScalarField:
    f.name = name
    return f


def h_convex_fields() -> dict[str, ScalarField]:
    """C^2 H-convex fields on all of space (the gauge is smooth off the origin only)."""
    w = horizontal_square()
    r = quartic_gauge()
    return {
        "x2+y2": w,
        "r": r,
        "r^2": radial_field(power(2)),
        "t": T_COORD,
        "x+2t": _named(X_COORD + T_COORD * 2.0, "x+2t"),
        "exp(x)": X_COORD.apply(exponential()),
        "exp(x+y)": _named((X_COORD + Y_COORD).apply(exponential()), "exp(x+y)"),
        "exp(r)": radial_field(exponential()),
        "(x2+y2)^2": w.apply(power(2)),
        "t^2+4(x2+y2)^2": _named(T_COORD.apply(power(2)) + w.apply(power(2)) * 4.0, "t^2+4(x2+y2)^2"),
        "fmax(x2+y2,2t)": convex_compose(mollified_max_function(0.5), w, T_COORD * 2.0),
        "perturbed(t^2)": epsilon_perturb(T_COORD.apply(power(2)), 0.5),
    }


def translated_catalog(centers=((0.2, -0.1, 0.05), (-0.15, 0.1, -0.1))) -> dict[str, ScalarField]:
    """The H-convex catalog together with left translates (which stay H-convex)."""
    base = h_convex_fields()
    out = dict(base)
    for k, c in enumerate(centers):
        for name, f in base.items():
            out[f"{name}@{k}"] = f.translated(c)
    return out


def jet_test_fields() -> dict[str, ScalarField]:
    """Twelve smooth fields (convex or not) for derivative cross-checks."""
    t2 = T_COORD.apply(power(2))
    return {
        "t": T_COORD,
        "x2+y2": horizontal_square(),
        "r": quartic_gauge(),
        "r^2": radial_field(power(2)),
        "gauge": gauge_field(),
        "quartic_barrier": quartic_barrier(1.0, 0.5, -1.0),
        "exp_barrier": exp_barrier(1.0, 10.0),
        "cone@": gauge_cone((0.3, -0.2, 0.1), 1.0, 1.0),
        "-t^2": _named(t2 * -1.0, "-t^2"),
        "xyt+x^3": _named(X_COORD * Y_COORD * T_COORD + X_COORD.apply(power(3)), "xyt+x^3"),
        "exp(x)cos(t)+y^2": _named(X_COORD.apply(exponential()) * T_COORD.apply(_cos) + Y_COORD.apply(power(2)),
                                   "exp(x)cos(t)+y^2"),
        "gauge+0.1|z|^2": epsilon_perturb(gauge_field(), 0.1),
    }


FIELD_FACTORIES: dict[str, Callable[[], ScalarField]] = {
    "x2+y2": horizontal_square,
    "r": quartic_gauge,
    "gauge": gauge_field,
    "t": lambda: T_COORD,
    "cone": lambda: gauge_cone(),
    "quartic": lambda: quartic_barrier(1.0, 0.5, -1.0),
    "exp-barrier": lambda: exp_barrier(1.0, 10.0),
    "zero": lambda: constant(0.0),
}


def field_by_name(name: str) -> ScalarField:
    try:
        return FIELD_FACTORIES[name]()
    except KeyError:
        raise ValueError(f"unknown field {name!r}; choose from {sorted(FIELD_FACTORIES)}") from None
