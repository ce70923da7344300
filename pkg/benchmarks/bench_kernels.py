"""Time the compiled kernels against the numpy fallback.

Run ``python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]``.  Each
kernel is checked for agreement before timing.
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from hma import _kernels

python_kernels = _kernels.python_kernels
compiled_kernels = _kernels.compiled_kernels


def _cases(rng):
    xs, ws = np.polynomial.legendre.leggauss(32)
    delta = rng.uniform(-2.0, 2.0, 20000)
    values = rng.normal(size=2**18)
    stack = rng.normal(size=(10, 24, 24, 24))
    lo, inv_h = np.zeros(3), np.full(3, 23.0)
    pts = rng.uniform(0.0, 1.0, size=(20000, 3))
    return {
        "pairwise_sum (2^18)": ("pairwise_sum", (values,)),
        "fh_core (2e4 x GL32)": ("fh_core", (delta, xs, ws)),
        "trilinear (10 x 2e4)": ("trilinear", (stack, lo, inv_h, pts)),
    }


def _max_diff(a, b) -> float:
    if isinstance(a, tuple):
        return max(_max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        print("compiled extension not built; only the numpy backend is available", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'kernel':24s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for label, (fn, fargs) in _cases(rng).items():
        py, cy = getattr(python_kernels, fn), getattr(compiled_kernels, fn)
        diff = _max_diff(py(*fargs), cy(*fargs))
        t_py = min(timeit.repeat(lambda: py(*fargs), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: cy(*fargs), number=1, repeat=args.repeat)) * 1e3
        rows.append({"kernel": label, "numpy_ms": t_py, "cython_ms": t_cy, "speedup": t_py / t_cy, "max_diff": diff})
        print(f"{label:24s} {t_py:11.3f} {t_cy:12.3f} {t_py / t_cy:8.2f} {diff:10.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
