"""Equilibrium of the continuous-time Kyle insider model with quadratic
trading penalties: fixed-point solver, closed forms, equilibrium analytics
and Monte Carlo verification."""

from ._kylepen import *  # noqa: F401,F403
from ._kylepen import __doc__ as _doc

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
