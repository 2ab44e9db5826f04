"""Keating-Snaith moment constants c_k = a_k * f_k.

a_k is the arithmetic Euler product

    prod_p (1 - 1/p)^{k^2} sum_{m>=0} (Gamma(m+k) / (m! Gamma(k)))^2 p^{-m},

truncated at a prime cutoff, and f_k is the random-matrix factor

    lim_N N^{-k^2} prod_{j=1}^{N} Gamma(j) Gamma(j+2k) / Gamma(j+k)^2,

which equals prod_{j=0}^{k-1} j!/(j+k)! for integer k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .errors import PreconditionError
from .primes import primes_upto

SERIES_RTOL = 1e-15
_MAX_SERIES_TERMS = 10_000


def log_arithmetic_factor(k: float, prime_cutoff: int = 10**6) -> float:
    """log a_k truncated to primes p <= prime_cutoff."""
    if k < 0:
        raise PreconditionError(f"need k >= 0, got {k}")
    if prime_cutoff < 1000:
        raise PreconditionError(f"prime cutoff must be >= 1000, got {prime_cutoff}")
    p = primes_upto(prime_cutoff).astype(np.float64)
    tail = np.zeros_like(p)  # series minus its m = 0 term
    term = np.ones_like(p)
    active = np.ones(p.size, dtype=bool)
    for m in range(_MAX_SERIES_TERMS):
        if not active.any():
            break
        # (Gamma(m+1+k)/((m+1)! Gamma(k)))^2 = previous * ((m+k)/(m+1))^2
        term = np.where(active, term * ((m + k) / (m + 1)) ** 2 / p, 0.0)
        tail += term
        active &= term >= SERIES_RTOL * (1.0 + tail)
    else:
        raise RuntimeError("Euler factor series did not converge")
    logs = k * k * np.log1p(-1.0 / p) + np.log1p(tail)
    return math.fsum(logs.tolist())


def arithmetic_factor(k: float, prime_cutoff: int = 10**6) -> float:
    return math.exp(log_arithmetic_factor(k, prime_cutoff))


def _log_rmt_partial(k: float, N: int) -> float:
    j = np.arange(1, N + 1, dtype=np.float64)
    terms = gammaln(j) + gammaln(j + 2 * k) - 2 * gammaln(j + k)
    return math.fsum(terms.tolist()) - k * k * math.log(N)


def rmt_closed_form(k: int) -> Fraction:
    """prod_{j=0}^{k-1} j! / (j+k)! for integer k >= 0."""
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(math.factorial(j), math.factorial(j + k))
    return out


@dataclass(frozen=True)
class RMTFactor:
    k: float
    N: int
    at_N: float
    at_2N: float
    extrapolated: float
    closed_form: Fraction | None

    @property
    def value(self) -> float:
        """Closed form when k is an integer, the extrapolated limit otherwise."""
        return float(self.closed_form) if self.closed_form is not None else self.extrapolated


def rmt_factor(k: float, N: int = 2000) -> RMTFactor:
    """Finite-N products at N and 2N plus a first-order Richardson limit."""
    if k < 0:
        raise PreconditionError(f"need k >= 0, got {k}")
    if N < 100:
        raise PreconditionError(f"matrix cutoff must be >= 100, got {N}")
    f_n = math.exp(_log_rmt_partial(k, N))
    f_2n = math.exp(_log_rmt_partial(k, 2 * N))
    closed = rmt_closed_form(int(k)) if float(k).is_integer() else None
    return RMTFactor(k, N, f_n, f_2n, 2 * f_2n - f_n, closed)


@dataclass(frozen=True)
class KSResult:
    k: float
    a_k: float
    f_k: float
    c_k: float
    prime_cutoff: int
    matrix_cutoff: int
    f_k_extrapolated: float
    f_k_closed: Fraction | None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "a_k": self.a_k,
            "f_k": self.f_k,
            "c_k": self.c_k,
            "prime_cutoff": self.prime_cutoff,
            "matrix_cutoff": self.matrix_cutoff,
            "f_k_extrapolated": self.f_k_extrapolated,
            "f_k_closed": None if self.f_k_closed is None else str(self.f_k_closed),
        }


def moment_constant(k: float, prime_cutoff: int = 10**6, matrix_cutoff: int = 2000) -> KSResult:
    a = arithmetic_factor(k, prime_cutoff)
    rmt = rmt_factor(k, matrix_cutoff)
    f = rmt.value
    return KSResult(k, a, f, a * f, prime_cutoff, matrix_cutoff, rmt.extrapolated, rmt.closed_form)
