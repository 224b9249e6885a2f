"""Kernel backend selection.

Hot loops (patch extraction for 3x3 convolution, 2x2 pooling, greedy NMS)
have a numba implementation and a pure-numpy one. Numba is used when it is
importable and ``GNETDET_DISABLE_JIT`` is not set to a truthy value.
"""

import os

_FLAG = "GNETDET_DISABLE_JIT"


def _env_disabled() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba

    # the bundled TBB is often too old and numba warns when probing it
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"
