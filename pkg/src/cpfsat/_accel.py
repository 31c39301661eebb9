"""Optional numba acceleration.

Set ``CPFSAT_NUMBA=0`` to run every kernel as plain Python.  Kernels are
written once; ``jit`` returns the compiled version when numba is usable and
the original function otherwise.
"""
from __future__ import annotations

import os

_flag = os.environ.get("CPFSAT_NUMBA", "1").strip().lower()
WANT_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    if not WANT_NUMBA:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAS_NUMBA = False


def jit(fn):
    """Compile ``fn`` with numba if enabled; keep the Python original reachable."""
    if not HAS_NUMBA:
        fn.py_func = fn
        return fn
    compiled = _njit(cache=True, nogil=True)(fn)
    return compiled
