"""Optional numba acceleration.

Set ``QPENCIL_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The flag is
read once, at import time.
"""
import os

_FALSEY = {"", "0", "false", "no", "off"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

DISABLED_BY_ENV = os.environ.get("QPENCIL_DISABLE_NUMBA", "").strip().lower() not in _FALSEY
USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV


def njit(func):
    """Compile ``func`` in nopython mode when numba is importable.

    The compiled object is returned even when the env flag is set so that
    benchmarks and equivalence tests can still reach it; dispatch happens in
    :mod:`qpencil.kernels`.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
