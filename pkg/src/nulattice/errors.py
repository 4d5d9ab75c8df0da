"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class LatticeError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(LatticeError, ValueError):
    """Malformed arguments or configuration."""


class DivisionGuardError(LatticeError, ZeroDivisionError):
    """A denominator fell below the division-guard threshold."""


class NonFiniteError(LatticeError, ArithmeticError):
    """A computation produced an infinite or NaN value."""


class PoleError(LatticeError, ArithmeticError):
    """Evaluation hit a pole (or a zero crossing) of a weight or special function."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InconsistencyError(LatticeError, ArithmeticError):
    """A quantity that must be constant or polynomial was not, within tolerance."""


class NoRootError(LatticeError, ArithmeticError):
    """Root scan found no sign change."""

    def __init__(self, message: str, profile=None):
        super().__init__(message)
        self.profile = profile


class ConvergenceError(LatticeError, ArithmeticError):
    """A series failed to converge within its term budget."""


class PreconditionError(LatticeError, ValueError):
    """A documented precondition was violated."""
