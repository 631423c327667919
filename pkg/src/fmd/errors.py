"""Exception hierarchy.

Everything the library raises on bad input derives from :class:`FMDError`
(a ``ValueError``). :class:`PrecisionError` marks numerical failures rather
than invalid input, and the CLI maps the two to different exit codes.
"""


class FMDError(ValueError):
    """Base class for invalid-input errors."""


class InvalidPredictiveError(FMDError):
    pass


class InvalidMassError(FMDError):
    pass


class DegenerateMassError(FMDError):
    """A mass function has a zero component where strict positivity is required."""


class DimensionError(FMDError):
    pass


class InvalidAssertionError(FMDError):
    pass


class NonMonotoneCompletionError(FMDError):
    pass


class BoundViolationError(FMDError):
    pass


class NotExtendibleError(FMDError):
    pass


class InvalidExtensionError(FMDError):
    pass


class NonCoherentTripleError(FMDError):
    pass


class EmptyWindowError(FMDError):
    pass


class UnsupportedParametersError(FMDError):
    pass


class PrecisionError(FMDError, ArithmeticError):
    """A numerical routine could not reach its requested tolerance."""
