"""Prime Dirichlet polynomials and the mean-value kernel behind them.

``g_sum`` is the smoothed prime sum

    G(t) = sum_{T^a < p <= T^b} p^{-(1/2 + 1/(c log T) + it)} * log(T^c / p) / log(T^c)

over a prime window (exponents ``a < b``) with smoothing exponent ``c >= b``.
``majorant_rhs`` is the conditional upper bound for ``log|zeta(1/2+it)|`` built
from such a sum. ``f_of_n`` and ``cos_product_mean`` give the exact and the
numerical mean value of a product of cosines ``cos(t log p)``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError, RegimeError
from .primes import DEFAULT_CAPACITY, PrimeWindow, primes_in, primes_upto

_EXACT_MAX_FACTORS = 12
_BLOCK_ELEMS = 1 << 21


class OutOfRegimeWarning(UserWarning):
    """Evaluation requested outside the hypotheses of the underlying bound."""


@dataclass(frozen=True)
class SmoothedPolyConfig:
    T: float
    beta_i_minus_1: float
    beta_i: float
    beta_j: float
    capacity: int = DEFAULT_CAPACITY

    def __post_init__(self) -> None:
        if self.T < 1e3:
            raise PreconditionError(f"base height T must be >= 1e3, got {self.T}")
        if not 0 <= self.beta_i_minus_1 < self.beta_i <= self.beta_j:
            raise PreconditionError(
                "need 0 <= beta_i_minus_1 < beta_i <= beta_j, got "
                f"({self.beta_i_minus_1}, {self.beta_i}, {self.beta_j})"
            )
        if self.beta_j * math.log(self.T) > math.log(self.capacity):
            raise PreconditionError(f"T^beta_j = {self.T ** self.beta_j:.4g} exceeds sieve capacity")

    @property
    def log_smooth(self) -> float:
        """log(T^beta_j)."""
        return self.beta_j * math.log(self.T)

    def primes(self) -> np.ndarray:
        log_t = math.log(self.T)
        lo = math.exp(self.beta_i_minus_1 * log_t)
        hi = math.exp(self.beta_i * log_t)
        if hi <= lo:
            return np.zeros(0, dtype=np.int64)
        return primes_in(PrimeWindow(lo, hi, self.capacity))

    def weights(self, primes: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(log p, real weight) per prime: p^{-sigma} * log(T^c/p)/log(T^c)."""
        if primes is None:
            primes = self.primes()
        log_p = np.log(primes.astype(np.float64))
        sigma = 0.5 + 1.0 / self.log_smooth
        w = np.exp(-sigma * log_p) * (1.0 - log_p / self.log_smooth)
        return log_p, w


def prime_poly(log_p: np.ndarray, weights: np.ndarray, t) -> np.ndarray:
    """sum_p weights_p * p^{-it} for each entry of ``t`` (complex array)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if log_p.size == 0:
        return np.zeros(t.shape, dtype=np.complex128)
    out = np.empty(t.shape, dtype=np.complex128)
    rows = max(1, _BLOCK_ELEMS // log_p.size)
    for s in range(0, t.size, rows):
        ph = t[s : s + rows, None] * log_p[None, :]
        out[s : s + rows] = np.cos(ph) @ weights - 1j * (np.sin(ph) @ weights)
    return out


def g_sum(cfg: SmoothedPolyConfig, t):
    """The smoothed prime polynomial G(t); vectorised over ``t``."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0):
        raise PreconditionError("g_sum needs t >= 0")
    log_p, w = cfg.weights()
    out = prime_poly(log_p, w, arr)
    return complex(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def majorant_rhs(t, x: float, T: float, N: float = 0.0, capacity: int = DEFAULT_CAPACITY):
    """Right-hand side of the conditional upper bound for log|zeta(1/2+it)|.

    Re( sum_{p<=x} p^{-(1/2+1/log x+it)} log(x/p)/log x
        + sum_{p<=min(sqrt x, log T)} p^{-1-2it}/2 ) + log T/log x + N

    The bound is stated for ``T <= t <= 2T``. Evaluation is allowed for any
    ``t >= 10``; points outside ``[T, 2T]`` raise an ``OutOfRegimeWarning``.
    """
    arr = np.asarray(t, dtype=np.float64)
    if not 2 <= x <= T * T:
        raise PreconditionError(f"need 2 <= x <= T^2, got x={x}, T={T}")
    if np.any(arr < 10):
        raise PreconditionError("majorant_rhs needs t >= 10")
    if np.any((arr < T) | (arr > 2 * T)):
        warnings.warn("majorant evaluated outside T <= t <= 2T", OutOfRegimeWarning, stacklevel=2)

    log_x = math.log(x)
    ps = primes_upto(x, capacity)
    log_p = np.log(ps.astype(np.float64))
    w1 = np.exp(-(0.5 + 1.0 / log_x) * log_p) * (log_x - log_p) / log_x
    total = prime_poly(log_p, w1, arr).real

    cut = min(math.sqrt(x), math.log(T))
    qs = primes_upto(cut, capacity)
    if qs.size:
        log_q = np.log(qs.astype(np.float64))
        # p^{-1-2it}/2: weight 1/(2p) at doubled frequency
        total = total + prime_poly(2.0 * log_q, 0.5 / qs.astype(np.float64), arr).real
    total = total + math.log(T) / log_x + N
    return float(total[0]) if arr.ndim == 0 else total.reshape(arr.shape)


@dataclass(frozen=True)
class Factorization:
    """n = prod p_i^{a_i}: strictly increasing primes, exponents >= 1."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple((int(p), int(a)) for p, a in self.factors))
        prev = 1
        for p, a in self.factors:
            if p <= prev:
                raise PreconditionError("factorization primes must be strictly increasing")
            if a < 1:
                raise PreconditionError("factorization exponents must be >= 1")
            if not _is_prime(p):
                raise PreconditionError(f"{p} is not prime")
            prev = p

    @classmethod
    def of(cls, n: int) -> "Factorization":
        if n < 1:
            raise PreconditionError("can only factor positive integers")
        out = []
        d = 2
        while d * d <= n:
            if n % d == 0:
                a = 0
                while n % d == 0:
                    n //= d
                    a += 1
                out.append((d, a))
            d += 1 if d == 2 else 2
        if n > 1:
            out.append((n, 1))
        return cls(tuple(out))

    @classmethod
    def from_primes(cls, primes: Iterable[int]) -> "Factorization":
        return cls(tuple(sorted(Counter(int(p) for p in primes).items())))

    @property
    def value(self) -> int:
        return math.prod(p**a for p, a in self.factors)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def f_of_n(fac: Factorization | int) -> Fraction:
    """The square-supported multiplicative function f(n).

    f vanishes unless every exponent is even; otherwise
    f(n) = prod_i 2^{-a_i} a_i! / ((a_i/2)!)^2.
    """
    if not isinstance(fac, Factorization):
        fac = Factorization.of(int(fac))
    out = Fraction(1)
    for _, a in fac.factors:
        if a % 2:
            return Fraction(0)
        out *= Fraction(math.comb(a, a // 2), 2**a)
    return out


def cos_product_mean(primes: Sequence[int], T_int: float, method: str = "auto") -> float:
    """(1/T) * integral_0^T prod_p cos(t log p) dt for a multiset of primes.

    ``method="exact"`` (the default for up to 12 factors) expands the product
    into 2^(m-1) cosines and integrates each in closed form; resonant
    frequencies are detected exactly with integer arithmetic.
    ``method="quadrature"`` uses Gauss-Legendre panels instead.
    """
    ps = [int(p) for p in primes]
    if T_int <= 0 or T_int > 1e7:
        raise PreconditionError(f"need 0 < T_int <= 1e7, got {T_int}")
    if any(not _is_prime(p) for p in ps):
        raise PreconditionError("cos_product_mean takes a multiset of primes")
    if ps and sum(math.log(p) for p in ps) > 0.4 * math.log(T_int):
        raise RegimeError("prime product exceeds T_int^0.4")
    if method == "auto":
        method = "exact" if len(ps) <= _EXACT_MAX_FACTORS else "quadrature"
    if not ps:
        return 1.0
    if method == "exact":
        return _cos_mean_exact(ps, T_int)
    if method == "quadrature":
        return _cos_mean_quadrature(ps, T_int)
    raise PreconditionError(f"unknown method {method!r}")


def _cos_mean_exact(ps: list[int], T: float) -> float:
    head, rest = ps[0], ps[1:]
    logs = [math.log(p) for p in rest]
    terms = []
    for signs in itertools.product((1, -1), repeat=len(rest)):
        num, den = head, 1
        w = math.log(head)
        for s, p, lp in zip(signs, rest, logs):
            if s > 0:
                num *= p
                w += lp
            else:
                den *= p
                w -= lp
        if num == den:
            terms.append(1.0)
        else:
            terms.append(math.sin(w * T) / (w * T))
    return math.fsum(terms) / 2 ** len(rest)


def _cos_mean_quadrature(ps: list[int], T: float, nodes: int = 16) -> float:
    log_p = np.log(np.asarray(ps, dtype=np.float64))
    width = min(1.0, 1.0 / float(log_p.sum()))
    n_panels = int(math.ceil(T / width))
    h = T / n_panels
    x, wts = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * h * (x + 1.0)
    wts = 0.5 * h * wts
    total = []
    chunk = max(1, _BLOCK_ELEMS // (nodes * len(ps)))
    for s in range(0, n_panels, chunk):
        left = h * np.arange(s, min(s + chunk, n_panels), dtype=np.float64)
        t = (left[:, None] + x[None, :]).ravel()
        vals = np.prod(np.cos(t[:, None] * log_p[None, :]), axis=1)
        total.append(float(np.sum(vals.reshape(-1, nodes) @ wts)))
    return math.fsum(total) / T
