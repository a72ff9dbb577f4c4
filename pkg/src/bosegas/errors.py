"""Exception and warning types shared across the package."""


class BosegasError(Exception):
    """Base class for package errors."""


class DomainError(BosegasError, ValueError):
    """Input outside the mathematical domain of an operation."""


class AccuracyError(BosegasError, ArithmeticError):
    """Requested tolerance could not be reached."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConvergenceError(AccuracyError):
    """Iterative solver did not converge; carries the residual history."""

    def __init__(self, message, residuals=()):
        super().__init__(message, achieved=residuals[-1] if residuals else None)
        self.residuals = list(residuals)


class DivergenceError(AccuracyError):
    """A sum or integral was detected to be non-convergent."""


class MeshError(BosegasError, ArithmeticError):
    """Finite element system could not be solved on the given mesh."""


class SizingError(BosegasError):
    """A basis or lattice enumeration would exceed its configured cap."""

    def __init__(self, message, size):
        super().__init__(message)
        self.size = size


class ConditioningWarning(UserWarning):
    """Result is valid but numerically ill conditioned."""


class TruncationWarning(UserWarning):
    """Operator terms were dropped by a finite mode set."""
