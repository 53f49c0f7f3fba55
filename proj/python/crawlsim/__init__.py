"""Two-body crawler with dry friction: regularised and event-driven solvers."""

from ._core import *  # noqa: F401,F403
from ._core import InvalidInput, SolverError  # noqa: F401

__version__ = "0.1.0"
