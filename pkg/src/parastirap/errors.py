"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "ParastirapError",
    "InvalidParameterError",
    "InfeasibleDesignError",
    "InvalidStepError",
    "InvalidStateError",
    "UnsupportedVariantError",
    "WindowingViolationError",
    "UnreachableTargetError",
    "ContractViolationError",
    "ConfigError",
]


class ParastirapError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ParastirapError, ValueError):
    """A numeric input is out of range or non-finite."""


class InfeasibleDesignError(ParastirapError, ValueError):
    """The requested equidistant-eigenvalue level line does not exist.

    Carries the offending squared Rabi frequency and, when known, the time
    at which the solve failed.
    """

    def __init__(self, message: str, *, value: float | None = None,
                 time: float | None = None, index: int | None = None):
        super().__init__(message)
        self.value = value
        self.time = time
        self.index = index


class InvalidStepError(ParastirapError, ValueError):
    """Integration step incompatible with the schedule grid."""


class InvalidStateError(ParastirapError, ValueError):
    """A quantum state violates its normalization contract."""


class UnsupportedVariantError(ParastirapError, ValueError):
    """The operation is only implemented for a restricted design family."""


class WindowingViolationError(ParastirapError, ValueError):
    """A field has not decayed at the edges of its transform window."""


class UnreachableTargetError(ParastirapError, ValueError):
    """A sweep never reaches the requested transfer probability."""

    def __init__(self, message: str, *, strategy: str | None = None):
        super().__init__(message)
        self.strategy = strategy


class ContractViolationError(ParastirapError, RuntimeError):
    """A numerical-quality contract (norm drift, ...) was broken at runtime."""


class ConfigError(ParastirapError, ValueError):
    """A run configuration failed schema validation."""
