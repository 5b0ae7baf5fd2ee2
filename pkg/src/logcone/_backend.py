"""Backend selection for the hot kernels.

The dense convolution and Jacobi eigensolver kernels exist twice: a numba
@njit build and a pure-numpy fallback.  The environment variable
LOGCONE_NUMBA picks the path:

    LOGCONE_NUMBA=0   force the numpy fallback
    LOGCONE_NUMBA=1   require numba (ImportError if unavailable)
    unset             use numba when importable, numpy otherwise

The decision is made once at import time; benchmarks/bench_kernels.py spawns
subprocesses with both settings to compare them.
"""

import os


def _resolve() -> bool:
    flag = os.environ.get("LOGCONE_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        if flag in ("1", "true", "on", "yes"):
            raise
        return False
    return True


USE_NUMBA = _resolve()
