"""Kernel backend selection.

The compiled extension is preferred; the NumPy implementation is used
when it is missing or when ``FUZZWELL_PURE_PYTHON`` is set to a non-empty
value. Both expose the same four functions with identical contracts.
"""

from __future__ import annotations

import os

if os.environ.get("FUZZWELL_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

mf_grid = kernels.mf_grid
clip_accumulate = kernels.clip_accumulate
centroid_moments = kernels.centroid_moments
loess = kernels.loess


def backend_name() -> str:
    """Which kernel implementation is active: 'compiled' or 'numpy'."""
    return kernels.IMPLEMENTATION
