"""Kernel backend selection.

Hot inner loops (SGD embedding training, collapsed Gibbs sweeps, BM25
scoring) are written once in an njit-compilable subset of numpy and compiled
with numba when available.  Setting the environment variable
``FISHERDOC_NUMBA=0`` (or numba being absent) selects the interpreted
fallback, which produces the same results and is used for debugging and for
the backend-comparison benchmark.
"""

import os

_FALSY = {"0", "false", "no", "off"}


def numba_requested() -> bool:
    return os.environ.get("FISHERDOC_NUMBA", "1").strip().lower() not in _FALSY


def _probe() -> bool:
    if not numba_requested():
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _probe()

if USE_NUMBA:
    from numba import njit as _njit

    def jit_kernel(func):
        return _njit(cache=True)(func)

else:

    def jit_kernel(func):
        return func


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
