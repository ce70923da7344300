"""Horizontal Monge-Ampere analysis on the first Heisenberg group.

Submodules: ``group`` (law, gauge, flows), ``jets`` (fields and horizontal
calculus), ``convexity`` (H-convexity checks, mollified max), ``barriers``
(cones and barrier functions), ``measure`` (quadrature and measures),
``principles`` (verification harness) and ``cli``.
"""

from ._kernels import BACKEND
from .barriers import epsilon_perturb, exp_barrier, gauge_cone, horizontal_square, quartic_barrier
from .convexity import check_group_segments, check_psd, convex_compose, mollified_max
from .group import ORIGIN, GaugeBall, Point, compose, dilate, distance, gauge, inverse
from .jets import ScalarField, horizontal_hessian, horizontal_jet, ma_density
from .measure import MeasureEstimate, QuadratureSpec, h_measure, integrate
from .principles import VerificationReport, build_chain, run_suite
from .regions import Annulus, Ball, Box, parse_region

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ORIGIN",
    "Annulus",
    "Ball",
    "Box",
    "GaugeBall",
    "MeasureEstimate",
    "Point",
    "QuadratureSpec",
    "ScalarField",
    "VerificationReport",
    "build_chain",
    "check_group_segments",
    "check_psd",
    "compose",
    "convex_compose",
    "dilate",
    "distance",
    "epsilon_perturb",
    "exp_barrier",
    "gauge",
    "gauge_cone",
    "h_measure",
    "horizontal_hessian",
    "horizontal_jet",
    "horizontal_square",
    "integrate",
    "inverse",
    "ma_density",
    "mollified_max",
    "parse_region",
    "quartic_barrier",
    "run_suite",
]
