"""Evaluation of zeta(1/2 + it) on the critical line.

Two evaluation routes, switched at ``t = 50``:

* ``t < 50``: Euler-Maclaurin summation with a fixed number of terms
  (accurate to ~1e-14 there).
* ``t >= 50``: Riemann-Siegel main sum plus the correction terms C0..C4.
  The C_k are built from derivatives of
  ``Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)``, whose Taylor series
  about ``p = 1/2`` is generated once in high precision with mpmath.

Everything is vectorised over ``t``; scalars in give scalars out.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import RangeError

T_MAX = 1e8
SWITCH_T = 50.0
NEAR_ZERO_ABS = 1e-6
NEAR_ZERO_SENTINEL = -50.0

_EM_N = 40
_EM_M = 30
_PSI_TERMS = 90
_BLOCK_ELEMS = 1 << 21


def _check_range(t: np.ndarray) -> None:
    if not np.all(np.isfinite(t)):
        raise RangeError("t must be finite")
    if np.any(np.abs(t) > T_MAX):
        raise RangeError(f"|t| must be <= {T_MAX:g}")


def theta(t):
    """Riemann-Siegel theta function via its Stirling series (t > 0)."""
    t = np.asarray(t, dtype=np.float64)
    return (
        0.5 * t * np.log(t / (2 * math.pi))
        - 0.5 * t
        - math.pi / 8
        + 1 / (48 * t)
        + 7 / (5760 * t**3)
        + 31 / (80640 * t**5)
    )


@lru_cache(maxsize=1)
def _psi_derivative_polys() -> dict[int, np.ndarray]:
    # Psi = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z), z = p - 1/2; entire in z.
    import mpmath as mp

    with mp.workdps(150):
        two_pi = 2 * mp.pi
        c5, s5 = mp.cos(5 * mp.pi / 8), mp.sin(5 * mp.pi / 8)
        num = [mp.mpf(0)] * _PSI_TERMS
        for m in range(0, (_PSI_TERMS + 1) // 2):
            a = two_pi**m / mp.factorial(m)
            num[2 * m] = (c5, s5, -c5, -s5)[m % 4] * a
        den = [mp.mpf(0)] * _PSI_TERMS
        for m in range(0, _PSI_TERMS, 2):
            den[m] = (-1) ** (m // 2) * two_pi**m / mp.factorial(m)
        q = [mp.mpf(0)] * _PSI_TERMS
        for n in range(_PSI_TERMS):
            acc = num[n]
            for m in range(2, n + 1, 2):
                acc -= den[m] * q[n - m]
            q[n] = acc
        base = np.array([float(-x) for x in q])

    polys = {0: base}
    cur = base
    for d in range(1, 13):
        cur = cur[1:] * np.arange(1, len(cur))
        polys[d] = cur
    return polys


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    for a in coeffs[::-1]:
        out = out * z + a
    return out


def rs_corrections(p: np.ndarray) -> list[np.ndarray]:
    """Riemann-Siegel correction coefficients C0..C4 at fractional part ``p``."""
    z = np.asarray(p, dtype=np.float64) - 0.5
    polys = _psi_derivative_polys()
    d = {k: _horner(polys[k], z) for k in (0, 1, 2, 3, 4, 5, 6, 8, 9, 12)}
    pi2 = math.pi**2
    c0 = d[0]
    c1 = -d[3] / (96 * pi2)
    c2 = d[2] / (64 * pi2) + d[6] / (18432 * pi2**2)
    c3 = -d[1] / (64 * pi2) - d[5] / (3840 * pi2**2) - d[9] / (5308416 * pi2**3)
    c4 = (
        d[0] / (128 * pi2)
        + 19 * d[4] / (24576 * pi2**2)
        + 11 * d[8] / (5898240 * pi2**3)
        + d[12] / (2038431744 * pi2**4)
    )
    return [c0, c1, c2, c3, c4]


def _rs_z(t: np.ndarray) -> np.ndarray:
    """Hardy Z(t) for t >= SWITCH_T (1-d float array)."""
    a = np.sqrt(t / (2 * math.pi))
    n_terms = np.floor(a).astype(np.int64)
    frac = a - n_terms
    th = theta(t)
    main = np.empty_like(t)

    order = np.argsort(n_terms, kind="stable")
    sorted_n = n_terms[order]
    bounds = np.flatnonzero(np.diff(sorted_n)) + 1
    for grp in np.split(order, bounds):
        if grp.size == 0:
            continue
        nn = int(n_terms[grp[0]])
        ns = np.arange(1, nn + 1, dtype=np.float64)
        log_n = np.log(ns)
        weights = 1.0 / np.sqrt(ns)
        rows = max(1, _BLOCK_ELEMS // nn)
        for s in range(0, grp.size, rows):
            idx = grp[s : s + rows]
            phase = th[idx, None] - t[idx, None] * log_n[None, :]
            main[idx] = 2.0 * (np.cos(phase) @ weights)

    u = np.sqrt(2 * math.pi / t)
    corr = np.zeros_like(t)
    for c in reversed(rs_corrections(frac)):
        corr = corr * u + c
    sign = np.where(n_terms % 2 == 1, 1.0, -1.0)
    return main + sign * np.sqrt(u) * corr


@lru_cache(maxsize=1)
def _em_constants() -> np.ndarray:
    from scipy.special import bernoulli

    b = bernoulli(2 * _EM_M)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, _EM_M + 1)])


def _em_zeta(t: np.ndarray) -> np.ndarray:
    """Euler-Maclaurin zeta(1/2 + it) for small |t| (1-d float array)."""
    s = 0.5 + 1j * t
    n = np.arange(1, _EM_N, dtype=np.float64)
    total = np.exp(-s[:, None] * np.log(n)[None, :]).sum(axis=1)
    big_n = float(_EM_N)
    n_pow = np.exp(-s * math.log(big_n))
    total = total + big_n * n_pow / (s - 1) + n_pow / 2
    rising = s.copy()
    n_pow = n_pow / big_n
    for j, coef in enumerate(_em_constants(), start=1):
        total = total + coef * rising * n_pow
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        n_pow = n_pow / big_n**2
    return total


def _as_array(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=np.float64)
    return np.atleast_1d(arr).ravel(), arr.ndim == 0


def zeta_half(t):
    """zeta(1/2 + it) for |t| <= 1e8; negative t maps to the conjugate."""
    flat, scalar = _as_array(t)
    _check_range(flat)
    at = np.abs(flat)
    out = np.empty(flat.shape, dtype=np.complex128)
    small = at < SWITCH_T
    if small.any():
        out[small] = _em_zeta(at[small])
    if (~small).any():
        tl = at[~small]
        out[~small] = _rs_z(tl) * np.exp(-1j * theta(tl))
    out = np.where(flat < 0, np.conj(out), out)
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(t))


def hardy_z(t):
    """Real-valued Z(t) = e^{i theta(t)} zeta(1/2 + it) for t >= 50."""
    flat, scalar = _as_array(t)
    _check_range(flat)
    if np.any(flat < SWITCH_T):
        raise RangeError(f"hardy_z is evaluated by Riemann-Siegel only for t >= {SWITCH_T:g}")
    z = _rs_z(flat)
    return float(z[0]) if scalar else z.reshape(np.shape(t))


def abs_zeta(t):
    """|zeta(1/2 + it)|, skipping the phase factor where Riemann-Siegel applies."""
    flat, scalar = _as_array(t)
    _check_range(flat)
    at = np.abs(flat)
    out = np.empty(flat.shape, dtype=np.float64)
    small = at < SWITCH_T
    if small.any():
        out[small] = np.abs(_em_zeta(at[small]))
    if (~small).any():
        out[~small] = np.abs(_rs_z(at[~small]))
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def log_abs_zeta(t):
    """log|zeta(1/2 + it)|.

    Where |zeta| falls below ``NEAR_ZERO_ABS`` (the evaluator's absolute
    accuracy floor) the logarithm is meaningless, and ``NEAR_ZERO_SENTINEL``
    is returned instead; test with :func:`is_near_zero`.
    """
    mag = np.asarray(abs_zeta(t), dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.where(mag < NEAR_ZERO_ABS, NEAR_ZERO_SENTINEL, np.log(np.maximum(mag, 1e-300)))
    return float(out) if out.ndim == 0 else out


def is_near_zero(value) -> np.ndarray | bool:
    v = np.asarray(value)
    res = v <= NEAR_ZERO_SENTINEL
    return bool(res) if res.ndim == 0 else res
