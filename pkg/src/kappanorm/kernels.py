"""Kernel backend selection.

The compiled extension ``_ckernels`` is preferred; set the environment
variable ``KAPPANORM_PURE_PYTHON=1`` (or build without Cython) to run on the
NumPy fallback in ``_pykernels``.
"""
import os

if os.environ.get("KAPPANORM_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
convex_hull_2d = _impl.convex_hull_2d
point_polygon_distance = _impl.point_polygon_distance
directed_hausdorff_2d = _impl.directed_hausdorff_2d
minkowski_sum_2d = _impl.minkowski_sum_2d
bellman_ford = _impl.bellman_ford

__all__ = [
    "BACKEND",
    "convex_hull_2d",
    "point_polygon_distance",
    "directed_hausdorff_2d",
    "minkowski_sum_2d",
    "bellman_ford",
]
