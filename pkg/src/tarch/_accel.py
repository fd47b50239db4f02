"""
JIT selection for the hot loops.

Kernels are written once as plain Python over numpy arrays.  When numba is
importable and ``TARCH_NO_NUMBA`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise the same source runs under the interpreter.  Both
paths perform the identical sequence of IEEE operations, so results are
bit-identical.
"""

import os

_flag = os.environ.get("TARCH_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _disabled


def compile_kernel(func):
    """Return the njit-compiled version of *func*, or None without numba."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(func)


def select(py_func, jit_func):
    if USE_NUMBA and jit_func is not None:
        return jit_func
    return py_func


def worker_count():
    """Worker cap from ``TARCH_THREADS``; affects speed only."""
    raw = os.environ.get("TARCH_THREADS", "").strip()
    if not raw:
        return 1 if os.cpu_count() is None else os.cpu_count()
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
