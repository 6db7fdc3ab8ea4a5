"""Numba switch.

Kernels are written once as plain numpy/Python functions and compiled with
``njit`` when numba is importable and ``SHC_NUMBA`` is not set to a false
value (``0``, ``false``, ``no``, ``off``). The flag is read at import time.
"""
import os

_FALSE = {"0", "false", "no", "off"}

try:
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    _numba = None
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and os.environ.get("SHC_NUMBA", "1").strip().lower() not in _FALSE


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)

    def _identity(fn):
        return fn
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return _identity
