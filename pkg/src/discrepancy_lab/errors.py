"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DiscrepancyLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DiscrepancyLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class DepthError(DomainError):
    """Requested digit depth exceeds the supported maximum."""


class RangeError(DomainError):
    """An integer parameter lies outside its admissible range."""


class ShapeError(DomainError):
    """A dyadic rectangle does not match the shape an operation expects."""


class HypothesisError(DomainError):
    """Inputs violate the hypothesis of a structural statement."""


class ResolutionError(DomainError):
    """A grid is too coarse for the point set it is paired with."""


class ParseError(DiscrepancyLabError, ValueError):
    """A point-set file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicatePointError(DomainError):
    """A point set contains the same point twice."""


class BudgetError(DiscrepancyLabError, RuntimeError):
    """A computation would exceed the configured work budget."""


class ConvergenceError(DiscrepancyLabError, RuntimeError):
    """An iterative procedure failed to converge."""
