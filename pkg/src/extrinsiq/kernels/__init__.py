"""Hot numeric kernels with a compiled core and a numpy fallback.

The compiled extension (``extrinsiq.kernels._native``, built from Cython)
is preferred when importable; setting ``EXTRINSIQ_PURE_PYTHON=1`` in the
environment forces the numpy backend. ``BACKEND`` records which one is
active. ``benchmarks/kernel_bench.py`` compares the two.
"""

import os

from . import pure

if os.environ.get("EXTRINSIQ_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _native as _impl

        BACKEND = "native"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

plane_residuals = _impl.plane_residuals
plane_inlier_counts = _impl.plane_inlier_counts
intersect_rectangle = _impl.intersect_rectangle

__all__ = [
    "BACKEND",
    "plane_residuals",
    "plane_inlier_counts",
    "intersect_rectangle",
    "pure",
]
