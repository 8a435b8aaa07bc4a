"""Selects between numba-compiled kernels and the plain numpy path.

Set ``TRIONLAMBDA_NUMBA=0`` before import to force the numpy fallback.
"""
import os

_flag = os.environ.get("TRIONLAMBDA_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    if not _wanted:
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


def kernel(func):
    """Compile ``func`` with numba when enabled, else return it untouched."""
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True)(func)
    return func
