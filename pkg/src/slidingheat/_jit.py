"""JIT switch for the hot loops.

Kernels are written in the numba-compatible subset of numpy. Setting
``SLIDINGHEAT_DISABLE_NUMBA=1`` (read once at import) runs the same source as
plain Python/numpy, which is also the path taken when numba is not installed.
"""
import logging
import os

_flag = os.environ.get("SLIDINGHEAT_DISABLE_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not DISABLED

if USE_NUMBA:
    logging.getLogger("numba").setLevel(logging.WARNING)


def jit(func):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
