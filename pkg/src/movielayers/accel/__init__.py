"""Kernel backend selection.

The JIT path is the default; set MOVIELAYERS_NO_NUMBA=1 to force the
pure-numpy fallback (it is also used automatically when numba is missing).
"""

import os

_flag = os.environ.get("MOVIELAYERS_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

if _disabled:
    from . import _numpy_kernels as _impl
else:
    try:
        from . import _numba_kernels as _impl
    except ImportError:
        from . import _numpy_kernels as _impl

BACKEND = _impl.BACKEND
betweenness = _impl.betweenness
distance_stats = _impl.distance_stats
power_iteration = _impl.power_iteration
