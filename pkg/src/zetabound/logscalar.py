"""Nonnegative reals stored as natural logarithms.

At loglog T = 1e8 the quantity log T = e^{1e8} is far outside float range,
so every bound in the asymptotic regime is carried as its logarithm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable


@total_ordering
@dataclass(frozen=True)
class LogScalar:
    """A value ``exp(log_value)``; ``log_value == -inf`` encodes exact zero."""

    log_value: float

    def __post_init__(self) -> None:
        if math.isnan(self.log_value) or self.log_value == math.inf:
            raise ValueError(f"invalid log value {self.log_value}")

    @classmethod
    def of(cls, x: float) -> "LogScalar":
        if x < 0:
            raise ValueError("LogScalar holds nonnegative values only")
        return cls(math.log(x) if x > 0 else -math.inf)

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(0.0)

    @property
    def is_zero(self) -> bool:
        return self.log_value == -math.inf

    def value(self) -> float:
        """The plain float (may overflow to inf)."""
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def __mul__(self, other: "LogScalar | float") -> "LogScalar":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return LogScalar.zero()
        return LogScalar(self.log_value + other.log_value)

    __rmul__ = __mul__

    def __truediv__(self, other: "LogScalar | float") -> "LogScalar":
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.is_zero:
            return self
        return LogScalar(self.log_value - other.log_value)

    def __add__(self, other: "LogScalar | float") -> "LogScalar":
        return logsumexp([self, _coerce(other)])

    __radd__ = __add__

    def __pow__(self, e: float) -> "LogScalar":
        if self.is_zero:
            if e <= 0:
                raise ValueError("0 ** e undefined for e <= 0")
            return self
        return LogScalar(self.log_value * e)

    def sqrt(self) -> "LogScalar":
        return self**0.5

    def __lt__(self, other: "LogScalar | float") -> bool:
        return self.log_value < _coerce(other).log_value

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float)):
            other = LogScalar.of(float(other))
        if not isinstance(other, LogScalar):
            return NotImplemented
        return self.log_value == other.log_value

    def __hash__(self) -> int:
        return hash(self.log_value)

    def __repr__(self) -> str:
        return "LogScalar(0)" if self.is_zero else f"LogScalar(log={self.log_value!r})"


def _coerce(x: "LogScalar | float") -> LogScalar:
    return x if isinstance(x, LogScalar) else LogScalar.of(float(x))


def logsumexp(items: Iterable[LogScalar | float]) -> LogScalar:
    """Sum of LogScalars without leaving log space."""
    logs = [_coerce(x).log_value for x in items]
    top = max(logs, default=-math.inf)
    if top == -math.inf:
        return LogScalar.zero()
    return LogScalar(top + math.log(math.fsum(math.exp(v - top) for v in logs)))
