"""Exception hierarchy shared by every pclab module."""


class PCLabError(Exception):
    """Base class for all pclab errors."""


class ValidationError(PCLabError, ValueError):
    """Malformed input: a bad interval, branch system, parameter point or file."""


class DomainError(PCLabError, ValueError):
    """A point was passed outside the domain of the map being evaluated."""


class NumericalError(PCLabError, RuntimeError):
    """An iterative routine did not converge within its budget."""


class InvariantViolation(PCLabError, RuntimeError):
    """A mathematical invariant that must hold was observed to fail.

    These indicate an implementation bug or a numerical misclassification and
    are never swallowed by the campaign driver.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class QuasiPartitionError(PCLabError):
    """The backward-orbit construction could not be completed for a map.

    ``reason`` is one of ``"g-connection"``, ``"budget-exhausted"`` or
    ``"hit-boundary"``; campaigns treat these as discarded samples.
    """

    def __init__(self, reason, message, details=None):
        super().__init__(message)
        self.reason = reason
        self.details = details or {}


class OverlappingImagesError(ValidationError):
    """Two branch images intersect."""


class ImageBoundsError(ValidationError):
    """A branch image is not contained in the open unit interval."""


class ContractionError(ValidationError):
    """A branch derivative violates 0 < |D phi| < 1 on [0, 1]."""
