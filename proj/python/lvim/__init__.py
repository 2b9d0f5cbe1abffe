"""Chebyshev collocation integrator with an RK45 oracle."""

from ._lvim import *  # noqa: F401,F403
from ._lvim import __version__  # noqa: F401
