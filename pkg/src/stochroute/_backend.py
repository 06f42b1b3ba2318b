"""Kernel backend selection.

``STOCHROUTE_BACKEND=numpy`` forces the vectorised numpy kernels;
``STOCHROUTE_BACKEND=numba`` (the default when numba imports) uses the
``@njit`` loops.  The flag is read once, at import time.
"""
import os

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba ships in the dev environment
    HAS_NUMBA = False

_requested = os.environ.get("STOCHROUTE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"STOCHROUTE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAS_NUMBA) else "numpy"


if HAS_NUMBA:
    from numba import njit
else:  # pragma: no cover

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper
