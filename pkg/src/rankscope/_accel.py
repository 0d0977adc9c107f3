"""Backend selection for the hot kernels.

``RANKSCOPE_NUMBA=0`` forces the pure-numpy path even when numba is
installed.  ``RANKSCOPE_THREADS`` caps the numba thread pool.
"""

import os

_truthy = os.environ.get("RANKSCOPE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = _truthy and HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise.

    Jitted functions are only *called* on the numba backend; the numpy
    backend uses separate vectorised implementations.
    """
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


if HAVE_NUMBA:
    prange = numba.prange
    # the bundled TBB is too old for numba; the workqueue layer is always there
    numba.config.THREADING_LAYER = os.environ.get("NUMBA_THREADING_LAYER", "workqueue")
    _threads = os.environ.get("RANKSCOPE_THREADS")
    if _threads:
        try:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass
else:  # pragma: no cover
    prange = range


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
