"""Numerical toolkit for upper bounds on moments of the Riemann zeta function."""

__version__ = "0.1.0"

from .errors import CapacityError, PreconditionError, RangeError, RegimeError, ZetaBoundError  # noqa: E402

__all__ = [
    "CapacityError",
    "PreconditionError",
    "RangeError",
    "RegimeError",
    "ZetaBoundError",
    "__version__",
]
