"""Hot kernels with a numba path and a pure-numpy fallback.

The active implementation is chosen once at import from ``QAMPENC_BACKEND``
(see :mod:`qampenc._backend`).  Both are importable directly as
``kernels.numba_impl`` / ``kernels.numpy_impl`` for benchmarking.
"""
from .._backend import BACKEND, HAVE_NUMBA
from . import _numpy as numpy_impl
from ._codes import COND_NONE, K_H, K_PHASE, K_RY, K_SWAP, K_X, K_Z

if HAVE_NUMBA:
    from . import _numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

_impl = numba_impl if BACKEND == "numba" else numpy_impl

dense_run = _impl.dense_run
branch_run = _impl.branch_run
greedy_depth = _impl.greedy_depth
max_share = _impl.max_share
sector_stats = _impl.sector_stats

__all__ = [
    "BACKEND", "COND_NONE", "K_H", "K_PHASE", "K_RY", "K_SWAP", "K_X", "K_Z",
    "dense_run", "branch_run", "greedy_depth", "max_share", "sector_stats",
    "numba_impl", "numpy_impl",
]
