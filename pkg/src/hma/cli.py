"""Command-line front end.

Exit codes: 0 when every check passes, 1 for usage errors, 2 when a
hypothesis check fails and 3 when a conclusion fails.  Reports are JSON
with sorted keys and are written once, after all work is done.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .catalog import FIELD_FACTORIES, field_by_name
from .convexity import alpha_radial, alpha_tensor
from .measure import (
    QuadratureSpec,
    c1_adaptive,
    c1_polar,
    export_csv,
    integrate,
    ma_density_fn,
    trace_density_fn,
    unit_ball_volume,
    unit_density,
)
from .principles import SUITES, build_chain, run_suite, summary_csv
from .regions import parse_region

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_CONCLUSION = 0, 1, 2, 3
DEFAULT_SEED = 0
SUITE_CHOICES = [*SUITES, "all"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hma", description="Horizontal Monge-Ampere toolkit on the Heisenberg group.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITE_CHOICES)
    v.add_argument("--R", type=float, default=1.0, help="outer radius (instances are dilated)")
    v.add_argument("--resolution", type=int, default=64, help="finest quadrature cells per axis")
    v.add_argument("--eps", type=float, default=0.0, help="singular exclusion radius")
    v.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    v.add_argument("--broken", action="store_true", help="run the broken-hypothesis controls")
    v.add_argument("--output", help="write the JSON report here instead of stdout")
    v.add_argument("--csv", help="also write a one-line-per-case summary")

    c = sub.add_parser("chain", help="build the boundary chain from a point")
    for axis in ("x0", "y0", "t0"):
        c.add_argument(f"--{axis}", type=float, required=True)
    c.add_argument("--R", type=float, default=1.0)
    c.add_argument("--output")

    i = sub.add_parser("integrate", help="integrate a density over a region")
    i.add_argument("--field", required=True, help="NAME-ma, NAME-trace or one")
    i.add_argument("--region", default="ball:1")
    i.add_argument("--eps", type=float, default=0.0)
    i.add_argument("--resolution", type=int, default=64)
    i.add_argument("--output")

    e = sub.add_parser("field-export", help="sample a field on a grid and write CSV")
    e.add_argument("--field", required=True, choices=sorted(FIELD_FACTORIES))
    e.add_argument("--region", default="ball:1")
    e.add_argument("--n", type=int, default=16, help="grid points per axis")
    e.add_argument("--output", required=True)

    k = sub.add_parser("constants", help="reference constants with their indicators")
    k.add_argument("--resolution", type=int, default=128)
    k.add_argument("--output")
    return p


def _emit(payload: dict, path: Optional[str]) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spec(resolution: int, eps: float) -> QuadratureSpec:
    try:
        return QuadratureSpec.finest(resolution, eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_verify(args) -> int:
    if not args.R > 0:
        raise UsageError("--R must be positive")
    spec = _spec(args.resolution, args.eps)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for n in names:
        reports.extend(run_suite(n, spec, args.seed, args.broken, args.R))
    statuses = [r.status for r in reports]
    code = EXIT_OK
    if "hypothesis_failed" in statuses:
        code = EXIT_HYPOTHESIS
    if "conclusion_failed" in statuses:
        code = EXIT_CONCLUSION
    payload = {
        "config": {
            "suite": args.suite, "R": args.R, "resolution": args.resolution, "eps": args.eps,
            "seed": args.seed, "broken": args.broken,
        },
        "passed": code == EXIT_OK,
        "reports": [r.to_dict() for r in reports],
    }
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(summary_csv(reports))
    _emit(payload, args.output)
    return code


def _cmd_chain(args) -> int:
    try:
        chain = build_chain((args.x0, args.y0, args.t0), args.R)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(chain.to_dict(), args.output)
    return EXIT_OK


def _density(name: str):
    if name == "one":
        return unit_density
    base, _, kind = name.rpartition("-")
    if kind not in ("ma", "trace") or not base:
        raise UsageError(f"bad field {name!r}; expected NAME-ma, NAME-trace or one")
    try:
        u = field_by_name(base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ma_density_fn(u) if kind == "ma" else trace_density_fn(u)


def _cmd_integrate(args) -> int:
    try:
        region = parse_region(args.region)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    density = _density(args.field)
    spec = _spec(args.resolution, args.eps)
    try:
        est = integrate(density, region, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit({"field": args.field, "region": region.to_dict(), "eps": args.eps,
           "resolution": args.resolution, **est.to_dict()}, args.output)
    return EXIT_OK


def _cmd_field_export(args) -> int:
    try:
        region = parse_region(args.region)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    lo, hi = region.global_box()
    axes = [np.linspace(lo[i], hi[i], args.n) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    u = field_by_name(args.field)
    keep = region.contains(grid)
    keep &= u.in_domain(grid)
    export_csv(u, grid[keep], args.output)
    return EXIT_OK


def _cmd_constants(args) -> int:
    c1a, c1b = c1_polar(), c1_adaptive()
    aa, ab = alpha_tensor(), alpha_radial()
    vol = unit_ball_volume(args.resolution)
    _emit({
        "c1": {"polar_gauss_legendre": c1a, "adaptive": c1b, "indicator": abs(c1a - c1b),
               "closed_form": 1.5 * math.pi**2},
        "alpha": {"tensor_gauss_legendre": aa, "radial_adaptive": ab, "indicator": abs(aa - ab)},
        "unit_ball_volume": {**vol.to_dict(), "closed_form": 0.5 * math.pi**2},
    }, args.output)
    return EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "chain": _cmd_chain,
    "integrate": _cmd_integrate,
    "field-export": _cmd_field_export,
    "constants": _cmd_constants,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_HYPOTHESIS", "EXIT_CONCLUSION"]


if __name__ == "__main__":
    main()
