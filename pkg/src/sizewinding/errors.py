"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SizeWindingError(Exception):
    """Base class for errors raised by this package."""


class MalformedInputError(SizeWindingError, ValueError):
    """Input has the wrong shape or an invalid value."""


class DimensionError(SizeWindingError, ValueError):
    """Operands live on incompatible Hilbert spaces."""


class ResourceLimitError(SizeWindingError, MemoryError):
    """Requested computation exceeds a configured dense-size cap."""


class ValidationError(SizeWindingError, ValueError):
    """An operator fails a structural check (Hermiticity, unitarity, ...)."""


class SaturationError(SizeWindingError, OverflowError):
    """A special-function argument lies outside the representable range."""


class SolverError(SizeWindingError, RuntimeError):
    """A root solve or quadrature did not converge."""


class IllConditionedError(SizeWindingError, ArithmeticError):
    """A linear inversion is numerically unreliable.

    Attributes
    ----------
    condition_number : float
        The 2-norm condition number of the offending system.
    """

    def __init__(self, message: str, condition_number: float):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number


class UndefinedFitError(SizeWindingError, ValueError):
    """No data points carry enough weight to fit a model."""


class DivergenceError(SizeWindingError, ArithmeticError):
    """A quantity diverges at the requested arguments (coincident endpoints)."""
