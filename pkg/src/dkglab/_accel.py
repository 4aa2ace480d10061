"""Optional numba acceleration.

Set ``DKGLAB_DISABLE_NUMBA=1`` to force the pure-numpy code paths, e.g. for
debugging or on platforms without numba.  Kernels decorated with :func:`njit`
become plain Python functions in that case; callers check :data:`USE_NUMBA`
to pick a vectorised numpy implementation instead of an interpreted loop.
"""
import os

_disabled = os.environ.get("DKGLAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    import numba
    from numba import njit

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
