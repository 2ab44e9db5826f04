"""Desk-scale moments (1/T) * int_T^{2T} |zeta(1/2+it)|^{2k} dt and large-value shares.

Monte Carlo estimates use stratified sampling (equal-width strata, one
uniform point per stratum) and jackknife standard errors. Quadrature uses
the composite trapezoid rule with a half-resolution error estimate.

Higher moments are capped at k = 3 for Monte Carlo: |zeta|^{2k} is so
heavy-tailed that the sample mean stops converging at reachable n.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError, RangeError
from .zeta import NEAR_ZERO_SENTINEL, abs_zeta, zeta_half

EULER_GAMMA = 0.57721566490153286061
CACHE_HEADER = ("t", "zeta_re", "zeta_im")
_CHUNK = 1 << 14


@dataclass(frozen=True)
class MomentEstimate:
    k: float
    T: float
    value: float
    std_error: float
    n: int
    method: str
    seed: int | None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LargeValueQuery:
    T: float
    V: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.V):
            raise PreconditionError("V must be finite")


@dataclass(frozen=True)
class LargeValueEstimate:
    T: float
    V: float
    fraction: float
    std_error: float
    n: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def stratified_points(T: float, n: int, seed: int) -> np.ndarray:
    """One uniform point in each of ``n`` equal strata of [T, 2T], ascending."""
    rng = np.random.default_rng(seed)
    return T + (np.arange(n) + rng.random(n)) * (T / n)


def jackknife_mean(x: np.ndarray) -> tuple[float, float]:
    """Sample mean and its delete-one jackknife standard error."""
    n = x.size
    if n < 2:
        raise PreconditionError("jackknife needs at least two samples")
    total = float(np.sum(x))
    loo = (total - x) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return total / n, se


def _chunked(fn: Callable[[np.ndarray], np.ndarray], t: np.ndarray, jobs: int) -> np.ndarray:
    # Chunk boundaries are fixed, so results are bitwise independent of jobs.
    pieces = [t[s : s + _CHUNK] for s in range(0, t.size, _CHUNK)]
    if jobs > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(fn, pieces))
    else:
        parts = [fn(p) for p in pieces]
    return np.concatenate(parts) if parts else np.zeros(0)


def write_sample_cache(path: str | os.PathLike, t: np.ndarray, z: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CACHE_HEADER)
        for ti, zi in zip(t.tolist(), np.asarray(z, dtype=np.complex128).tolist()):
            w.writerow((repr(ti), repr(zi.real), repr(zi.imag)))


def read_sample_cache(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CACHE_HEADER:
        raise PreconditionError(f"{path}: expected header {','.join(CACHE_HEADER)}")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64).reshape(-1, 3)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def sample_abs_zeta(t: np.ndarray, jobs: int = 1, cache: str | os.PathLike | None = None) -> np.ndarray:
    """|zeta(1/2+it)| at the given points, optionally backed by a CSV cache.

    Both paths take the modulus of the complex value, so a cache never
    changes a result.
    """
    if cache is None:
        return np.abs(_chunked(zeta_half, t, jobs))
    known: dict[float, complex] = {}
    if os.path.exists(cache):
        ct, cz = read_sample_cache(cache)
        known = dict(zip(ct.tolist(), cz.tolist()))
    missing = np.array([x for x in t.tolist() if x not in known], dtype=np.float64)
    if missing.size:
        for x, z in zip(missing.tolist(), _chunked(zeta_half, missing, jobs).tolist()):
            known[x] = z
        keys = np.array(sorted(known), dtype=np.float64)
        write_sample_cache(cache, keys, np.array([known[x] for x in keys.tolist()]))
    return np.abs(np.array([known[x] for x in t.tolist()], dtype=np.complex128))


def _check_mc(T: float, n: int) -> None:
    if not 1e3 <= T <= 1e7:
        raise RangeError(f"Monte Carlo moments need 1e3 <= T <= 1e7, got {T}")
    if n < 1000:
        raise PreconditionError(f"need n >= 1000 samples, got {n}")


def moment_from_samples(k: float, abs_z: np.ndarray) -> tuple[float, float]:
    return jackknife_mean(abs_z ** (2.0 * k))


def moment_mc(k: float, T: float, n: int, seed: int = 0, jobs: int = 1,
              cache: str | os.PathLike | None = None) -> MomentEstimate:
    if not 0 <= k <= 3:
        raise PreconditionError(f"Monte Carlo moments support 0 <= k <= 3, got {k}")
    _check_mc(T, n)
    t = stratified_points(T, n, seed)
    mag = np.ones(n) if k == 0 else sample_abs_zeta(t, jobs, cache)
    value, se = moment_from_samples(k, mag)
    return MomentEstimate(k, T, value, se, n, "monte_carlo", seed)


@lru_cache(maxsize=2)
def _abs_zeta_sq_grid(T: float, n_intervals: int) -> np.ndarray:
    t = T + (T / n_intervals) * np.arange(n_intervals + 1)
    sq = _chunked(abs_zeta, t, 1) ** 2
    sq.setflags(write=False)
    return sq


def _trapezoid(y: np.ndarray, h: float) -> float:
    return h * (float(np.sum(y)) - 0.5 * (float(y[0]) + float(y[-1])))


def moment_quadrature(k: int, T: float, step: float = 0.02) -> MomentEstimate:
    """Trapezoid-rule moment over [T, 2T] with nodes no further apart than ``step``.

    The reported ``std_error`` is the difference from the same rule at twice
    the spacing, a conservative error estimate for this smooth integrand.
    """
    if k not in (1, 2):
        raise PreconditionError(f"quadrature moments support k in {{1, 2}}, got {k}")
    if not 100 <= T <= 2e5:
        raise RangeError(f"quadrature moments need 100 <= T <= 2e5, got {T}")
    if not 0 < step <= 0.05:
        raise PreconditionError(f"quadrature step must be in (0, 0.05], got {step}")
    n = int(math.ceil(T / step))
    n += n % 2
    sq = _abs_zeta_sq_grid(float(T), n)
    y = sq**k
    h = T / n
    fine = _trapezoid(y, h)
    coarse = _trapezoid(y[::2], 2 * h)
    return MomentEstimate(k, T, fine / T, abs(fine - coarse) / T, n + 1, "quadrature", None)


def large_value_measure(q: LargeValueQuery, n: int, seed: int = 0, jobs: int = 1,
                        cache: str | os.PathLike | None = None) -> LargeValueEstimate:
    """Share of [T, 2T] where log|zeta(1/2+it)| >= V, by stratified sampling."""
    return large_value_curve(q.T, [q.V], n, seed, jobs, cache)[0]


def large_value_curve(T: float, Vs: Sequence[float], n: int, seed: int = 0, jobs: int = 1,
                      cache: str | os.PathLike | None = None) -> list[LargeValueEstimate]:
    """Large-value shares for several V on one shared sample set."""
    _check_mc(T, n)
    t = stratified_points(T, n, seed)
    mag = sample_abs_zeta(t, jobs, cache)
    with np.errstate(divide="ignore"):
        log_mag = np.where(mag > 0, np.log(np.maximum(mag, 1e-300)), NEAR_ZERO_SENTINEL)
    out = []
    for V in Vs:
        q = LargeValueQuery(T, float(V))
        frac, se = jackknife_mean((log_mag >= q.V).astype(np.float64))
        out.append(LargeValueEstimate(T, q.V, frac, se, n, seed))
    return out


def second_moment_mean(T: float) -> float:
    """Mean of |zeta|^2 over [T, 2T] from I_1(X) ~ X log(X/2pi) - (1 - 2 gamma) X."""
    def primitive(x: float) -> float:
        return x * math.log(x / (2 * math.pi)) - (1 - 2 * EULER_GAMMA) * x

    return (primitive(2 * T) - primitive(T)) / T


def fourth_moment_leading(T: float) -> float:
    """Mean over [T, 2T] of the leading term (1/2pi^2) log^4(t/2pi)."""
    from scipy.integrate import quad

    val, _ = quad(lambda x: math.log(x / (2 * math.pi)) ** 4, T, 2 * T)
    return val / (2 * math.pi**2) / T
