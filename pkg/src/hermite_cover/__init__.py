"""Hermite processes through local times of intersecting regenerative sets.

Samples stable regenerative sets by random interval covering, computes
approximate local times of their intersections, synthesizes Hermite process
paths by several independent routes and checks the closed-form quantities
that tie them together.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ConfigError,
    DomainError,
    HermiteCoverError,
    NumericalError,
    ParameterError,
    UnsupportedError,
    UsageError,
)
from .specfun import HermiteParams, derive_params  # noqa: E402
