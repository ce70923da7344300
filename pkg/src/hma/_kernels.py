"""Backend selection for the hot kernels.

The compiled extension is used when it was built and ``HMA_PURE_PYTHON`` is
unset; otherwise the numpy implementations are used.  ``BACKEND`` names the
active choice.
"""

from __future__ import annotations

import os

from . import _pykernels as python_kernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and not os.environ.get("HMA_PURE_PYTHON"):
    _active = compiled_kernels
    BACKEND = "cython"
else:
    _active = python_kernels
    BACKEND = "python"

pairwise_sum = _active.pairwise_sum
fh_core = _active.fh_core
bump_mass = _active.bump_mass
trilinear = _active.trilinear
