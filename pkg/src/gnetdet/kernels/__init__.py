"""Hot numeric kernels with a numba path and a numpy fallback.

``gnetdet.kernels.conv3x3`` and friends dispatch to whichever backend
``gnetdet._backend`` selected at import time. Both implementations stay
importable as ``kernels.numpy_impl`` / ``kernels.numba_impl`` so tests and
the backend benchmark can compare them directly.
"""

import importlib

from gnetdet._backend import BACKEND, USE_NUMBA
from gnetdet.kernels import numpy_impl

if USE_NUMBA:
    from gnetdet.kernels import numba_impl

    _impl = numba_impl
else:
    numba_impl = None
    _impl = numpy_impl

conv3x3 = _impl.conv3x3
maxpool2x2 = _impl.maxpool2x2
nms_keep = _impl.nms_keep


def get_impl(name: str):
    """Return the kernel module for ``"numpy"`` or ``"numba"``."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if numba_impl is None:
            # raises ImportError if numba is missing
            return importlib.import_module("gnetdet.kernels.numba_impl")
        return numba_impl
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "conv3x3", "maxpool2x2", "nms_keep", "get_impl"]
