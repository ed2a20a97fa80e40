"""Optional numba acceleration.

Set ``CARDCOMP_NUMBA=0`` to force the pure-numpy kernels (useful for
debugging and for platforms without numba).  The flag is read once at
import time.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a soft dependency
    numba = None

ENABLE_NUMBA = numba is not None and os.environ.get("CARDCOMP_NUMBA", "1") not in ("0", "false", "no")


def njit(func):
    """``numba.njit(cache=True)`` when available, the plain function otherwise."""
    if numba is None:
        return func
    return numba.njit(cache=True)(func)
