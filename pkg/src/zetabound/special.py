"""Error function.

For |x| <= 3 the positive-term series

    erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))

is summed (no cancellation). Beyond that erfc is evaluated from its
continued fraction with the modified Lentz algorithm.
"""
from __future__ import annotations

import math

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SERIES_LIMIT = 3.0
_TINY = 1e-300


def _erf_series(x: float) -> float:
    x2 = x * x
    term = x
    total = x
    n = 0
    while abs(term) > 1e-17 * abs(total):
        n += 1
        term *= 2 * x2 / (2 * n + 1)
        total += term
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    f = x
    c = x
    d = 0.0
    n = 1
    while True:
        a = n / 2.0
        d = x + a * d
        d = _TINY if d == 0 else d
        c = x + a / c
        c = _TINY if c == 0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16 or n > 500:
            break
        n += 1
    return math.exp(-x * x) / (math.sqrt(math.pi) * f)


def erfc(x: float) -> float:
    if x < 0:
        return 2.0 - erfc(-x)
    if x <= _SERIES_LIMIT:
        return 1.0 - _erf_series(x)
    return _erfc_cf(x)


def erf(x: float) -> float:
    """Standard error function, (2/sqrt(pi)) * integral_0^x exp(-t^2) dt."""
    if math.isnan(x):
        return x
    if x < 0:
        return -erf(-x)
    if x <= _SERIES_LIMIT:
        return _erf_series(x)
    return 1.0 - _erfc_cf(x)
