"""Exception hierarchy shared by all modules."""


class ZetaBoundError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(ZetaBoundError, ValueError):
    """An argument violates the documented precondition of an operation."""


class CapacityError(PreconditionError):
    """A prime window extends past the configured sieve capacity."""


class RangeError(PreconditionError):
    """An ordinate or height lies outside the supported evaluation range."""


class RegimeError(PreconditionError):
    """Asymptotic-regime hypotheses (e.g. loglog T >= (10000 k)^2) do not hold."""
