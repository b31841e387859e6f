"""Semantic exception hierarchy for the package."""


class NcorliczError(Exception):
    """Base class for all package errors."""


class DomainError(NcorliczError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ShapeMismatchError(NcorliczError, ValueError):
    """Block shapes of the operands do not match."""


class NotHermitianError(NcorliczError, ValueError):
    """Input is not Hermitian within the accepted asymmetry tolerance."""


class WeightConditionError(NcorliczError, ValueError):
    """A weight operator violates nonsingularity or conditioning limits."""


class SolveError(NcorliczError, RuntimeError):
    """An internal root-finding or search routine failed to converge."""


class SpecFormatError(NcorliczError, ValueError):
    """A text record (matrix, trace, weight, or N-function spec) is malformed."""
