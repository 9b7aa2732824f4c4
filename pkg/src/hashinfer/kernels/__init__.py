"""Hot-loop kernels with a compiled fast path and a numpy fallback.

The compiled extension is picked at import time when available. Set
HASHINFER_PURE_PYTHON=1 to force the numpy lane.
"""

import os

from . import _purepy

_impl = _purepy
if os.environ.get("HASHINFER_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _fastpath as _impl
    except ImportError:
        _impl = _purepy

jacobi_eigh = _impl.jacobi_eigh
hamming_distance_matrix = _impl.hamming_distance_matrix
brute_force_scan = _impl.brute_force_scan


def backend() -> str:
    """Name of the active kernel lane."""
    return "pure-python" if _impl is _purepy else "compiled"
