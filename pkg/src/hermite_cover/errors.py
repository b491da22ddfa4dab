"""Exception types shared across the package.

The CLI maps these onto its exit codes: usage/parameter problems exit 2,
numerical failures exit 3.
"""


class HermiteCoverError(Exception):
    """Base class for all package errors."""


class ParameterError(HermiteCoverError, ValueError):
    """A model parameter lies outside its admissible range."""


class DomainError(HermiteCoverError, ValueError):
    """A function argument lies outside the function's domain."""


class UsageError(HermiteCoverError, ValueError):
    """Inconsistent arguments (mismatched windows, wrong counts, ...)."""


class ConfigError(HermiteCoverError, ValueError):
    """An invalid simulation configuration."""


class UnsupportedError(HermiteCoverError, NotImplementedError):
    """A request outside the implemented cost envelope."""


class CapacityError(HermiteCoverError, MemoryError):
    """A problem too large for the dense method requested."""


class NumericalError(HermiteCoverError, ArithmeticError):
    """A numerical method failed (e.g. covariance not realizable)."""
