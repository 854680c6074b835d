"""Kernel backend selection.

``QAMPENC_BACKEND=numpy`` forces the pure-numpy kernels; the default is
``numba`` when it imports cleanly.  ``QAMPENC_THREADS`` caps numba's pool.
"""
import os

_requested = os.environ.get("QAMPENC_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"QAMPENC_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB may be too old and numba warns on every first launch
        numba.config.THREADING_LAYER = "omp"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def set_threads(n):
    """Cap the number of worker threads used by numba kernels (no-op otherwise)."""
    if n is None or not HAVE_NUMBA:
        return
    import numba

    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


_env_threads = os.environ.get("QAMPENC_THREADS")
if _env_threads:
    set_threads(_env_threads)
