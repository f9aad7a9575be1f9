"""Backend selection for the compiled kernels.

Set ``KCSP_DISABLE_NUMBA=1`` to force the pure-numpy path. Both paths
produce bit-identical results; the flag only changes speed.
"""
import os

_DISABLED = os.environ.get("KCSP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` in nopython mode, releasing the GIL.

    No fastmath: the compiled and numpy paths must agree bit for bit.
    """
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)
