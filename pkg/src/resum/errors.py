"""Exception hierarchy shared by all modules."""


class ResumError(Exception):
    """Base class for library errors."""


class DomainError(ResumError, ValueError):
    """Argument outside the domain of a function or constructor."""


class NonConvergence(ResumError):
    """Adaptive refinement ran out of budget.

    The best available value and its error estimate are kept on the
    exception so callers can decide whether they are usable.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class EvaluationFailure(ResumError):
    """Integrand returned a non-finite value at a quadrature node."""


class BranchConfluence(ResumError):
    """Requested point sits on the double root of s - ln s = t."""


class DenominatorZero(ResumError):
    """A zero of a density denominator lies on or too close to the contour."""


class OnCutError(ResumError):
    """Evaluation point lies on a branch cut; use side limits instead."""


class PoleOnContour(ResumError):
    """A kernel pole coincides with the integration contour."""


class ContourPinch(ResumError):
    """Two singularities pinch the contour of an iterated integral."""


class DecayViolation(ResumError):
    """A function does not decay as required at infinity."""


class ExtrapolationFailure(ResumError):
    """Side limits did not stabilise under Richardson extrapolation."""


class NoSingularity(ResumError):
    """The function has no cut to probe."""
