"""JIT switch for the hot kernels.

Set ``PERCLOCAL_NUMBA=0`` to run every kernel through its pure-numpy
fallback. The flag is read once at import time.
"""
import os

_flag = os.environ.get("PERCLOCAL_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _flag not in ("0", "false", "no", "off")


def njit(func):
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
