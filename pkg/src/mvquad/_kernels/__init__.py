"""Hot numeric kernels.

The numba path is used unless ``MVQ_NO_NUMBA`` is set to a truthy value or
numba cannot be imported; both paths expose identical functions.
"""
import os

from . import _numpy

_disabled = os.environ.get("MVQ_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if _disabled:
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        _impl = _numpy
        BACKEND = "numpy"

series = _impl.series
asymptotic_i = _impl.asymptotic_i
bessel_integral_j = _impl.bessel_integral_j
multilinear = _impl.multilinear

__all__ = ["BACKEND", "series", "asymptotic_i", "bessel_integral_j", "multilinear"]
