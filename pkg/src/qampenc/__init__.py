"""Shallow amplitude encoding: preprocessing, circuit simulation and analysis tools."""
__version__ = "0.1.0"

from ._backend import BACKEND, set_threads  # noqa: E402,F401
