"""Log-domain evaluation of the bounds chain in the regime loglog T >= (10000 k)^2.

All quantities are divided by T and carried as :class:`LogScalar`. With
``L = loglog T`` and ``L3 = log L``:

* large-value measure bounds for ``S(T, V) = {t : log|zeta| >= V}`` in three
  V-ranges split at ``T1 = 10 sqrt(L)``, ``T2 = L``, ``T3 = L L3 / 2``;
* the four-region integral of ``e^{2kV} meas(S(T,V))`` behind D3(k), each
  region evaluated both by log-domain quadrature and by its closed-form bound;
* lemma right-hand sides, the geometric-series condition, and the assembly of
  the implicit constant C(k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import PreconditionError, RegimeError
from .logscalar import LogScalar, logsumexp
from .partition import HarperParams, cap_index, log_beta

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class BoundConstants:
    """Unspecified absolute constants, all configurable.

    ``D1``/``D2`` default to ``e^k`` (they are only known to be e^{O(k)}).
    """

    N: float = 1.0
    M: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    b1: float = 1.0
    b2: float = 1.0
    b3: float = 1.0
    D1: float | None = None
    D2: float | None = None

    def d1(self, k: float) -> float:
        return math.exp(k) if self.D1 is None else self.D1

    def d2(self, k: float) -> float:
        return math.exp(k) if self.D2 is None else self.D2


@dataclass(frozen=True)
class RegimeParams:
    k: float
    L: float
    constants: BoundConstants = field(default_factory=BoundConstants)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise PreconditionError(f"need k >= 1, got {self.k}")
        if not self.L > 1:
            raise PreconditionError(f"need L > 1, got {self.L}")

    @property
    def L3(self) -> float:
        return math.log(self.L)

    @property
    def T1(self) -> float:
        return 10 * math.sqrt(self.L)

    @property
    def T2(self) -> float:
        return self.L

    @property
    def T3(self) -> float:
        return 0.5 * self.L * self.L3

    def in_regime(self) -> bool:
        return self.L >= (10000 * self.k) ** 2 and self.L3 > 5

    def check_regime(self) -> None:
        if not self.in_regime():
            raise RegimeError(f"need loglog T >= (10000 k)^2 = {(10000 * self.k) ** 2:g}, got L = {self.L:g}")


# -- large-value measure bound ------------------------------------------------

def large_value_range(V: float, p: RegimeParams) -> int:
    """0 for V <= T1 (trivial bound), then ranges (T1,T2], (T2,T3], (T3,inf)."""
    if V <= p.T1:
        return 0
    if V <= p.T2:
        return 1
    if V <= p.T3:
        return 2
    return 3


def _log_meas(rng: int, V: np.ndarray, p: RegimeParams) -> np.ndarray:
    c = p.constants
    L, L3 = p.L, p.L3
    if rng == 0:
        return np.zeros_like(V)
    if rng == 1:
        return math.log(c.b1) + np.log(V / math.sqrt(L)) - (V * V / L) * (1 - 4 / L3)
    if rng == 2:
        return math.log(c.b2) + np.log(V / math.sqrt(L)) - (V * V / L) * (1 - 7 * V / (4 * L * L3)) ** 2
    if rng == 3:
        return math.log(c.b3) - V * np.log(V) / 33
    raise PreconditionError(f"unknown range {rng}")


def large_value_bound(V: float, p: RegimeParams) -> LogScalar:
    """Bound on meas(S(T, V)) / T; V <= T1 gets the trivial bound 1."""
    if V < 3:
        raise PreconditionError(f"large-value bound needs V >= 3, got {V}")
    rng = large_value_range(V, p)
    return LogScalar(float(_log_meas(rng, np.array([float(V)]), p)[0]))


# -- log-domain quadrature ----------------------------------------------------

def _drop(peak: float) -> float:
    # beyond ~1e12 the float grid itself cannot resolve a drop of 60
    return max(60.0, 1e-10 * abs(peak))


def _argmax_unimodal(h: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    xs = np.linspace(a, b, 2049)
    i = int(np.argmax(h(xs)))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    g = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
        x1 = hi - g * (hi - lo)
        x2 = lo + g * (hi - lo)
        f1, f2 = h(np.array([x1, x2]))
        if f1 < f2:
            lo = x1
        else:
            hi = x2
    cands = np.array([a, b, 0.5 * (lo + hi)])
    return float(cands[int(np.argmax(h(cands)))])


def _edge(h, x_peak: float, x_far: float, level: float) -> float:
    """Point between x_peak and x_far where h crosses ``level`` (h(x_far) < level)."""
    inside, outside = x_peak, x_far
    for _ in range(200):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if h(np.array([mid]))[0] >= level:
            inside = mid
        else:
            outside = mid
    return outside


def log_integrate(
    h: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n_min: int = 10_000,
    rtol: float = 1e-6,
    max_panels: int = 1 << 22,
) -> LogScalar:
    """log of integral_lo^hi exp(h(x)) dx for unimodal ``h``; ends may be infinite.

    Midpoint panels reduced with log-sum-exp over the part of the interval
    where ``h`` is within ``_drop`` of its peak; the panel count doubles until
    the result moves by less than ``rtol`` (relative to max(1, |result|)).
    """
    if not lo < hi:
        return LogScalar.zero()
    # finite working bracket
    a = lo if math.isfinite(lo) else None
    b = hi if math.isfinite(hi) else None
    if a is None and b is None:
        raise PreconditionError("at least one integration limit must be finite")
    span = 1.0
    if a is None:
        while True:
            a = b - span
            if h(np.array([a]))[0] < h(np.array([b]))[0] - _drop(h(np.array([b]))[0]) and span > 1:
                break
            span *= 2
    if b is None:
        while True:
            b = a + span
            vals = h(np.linspace(a, b, 257))
            if vals[-1] < vals.max() - _drop(vals.max()) and int(np.argmax(vals)) < 256:
                break
            span *= 2

    x_peak = _argmax_unimodal(h, a, b)
    peak = float(h(np.array([x_peak]))[0])
    level = peak - _drop(peak)
    left = a if h(np.array([a]))[0] >= level else _edge(h, x_peak, a, level)
    right = b if h(np.array([b]))[0] >= level else _edge(h, x_peak, b, level)
    if right <= left:
        return LogScalar(peak + math.log(max(b - a, 1e-300)))

    def panels(n: int) -> float:
        w = (right - left) / n
        mids = left + w * (np.arange(n) + 0.5)
        v = h(mids)
        top = float(v.max())
        return top + math.log(float(np.sum(np.exp(v - top)))) + math.log(w)

    n = n_min
    prev = panels(n)
    while n < max_panels:
        n *= 2
        cur = panels(n)
        if abs(cur - prev) < rtol * max(1.0, abs(cur)):
            return LogScalar(cur)
        prev = cur
    return LogScalar(prev)


# -- the four regions -----------------------------------------------------------

@dataclass(frozen=True)
class RegionBound:
    region: int
    quadrature: LogScalar
    closed_form: LogScalar
    steps: dict[str, LogScalar] = field(default_factory=dict)
    pieces: dict[str, "RegionBound"] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.quadrature <= self.closed_form

    def to_dict(self) -> dict:
        return {
            "region": self.region,
            "log_quadrature": self.quadrature.log_value,
            "log_closed_form": self.closed_form.log_value,
            "holds": self.holds,
            "log_steps": {k: v.log_value for k, v in self.steps.items()},
            "pieces": {k: v.to_dict() for k, v in self.pieces.items()},
        }


def _integrand(rng: int, p: RegimeParams) -> Callable[[np.ndarray], np.ndarray]:
    k = p.k

    def h(V: np.ndarray) -> np.ndarray:
        return 2 * k * V + _log_meas(rng, V, p)

    return h


def region_integral(region: int, p: RegimeParams, enforce_regime: bool = True) -> RegionBound:
    """Bound on (1/T) * integral over region of e^{2kV} meas(S(T,V)) dV.

    ``enforce_regime=False`` evaluates the same formulas below the
    L >= (10000 k)^2 threshold, where they are still well defined.
    """
    if enforce_regime:
        p.check_regime()
    k, L, L3 = p.k, p.L, p.L3
    c = p.constants
    if region == 1:
        quad = log_integrate(_integrand(0, p), -math.inf, p.T1)
        steps = {
            "exact": LogScalar(2 * k * p.T1 - math.log(2 * k)),
            "stated": LogScalar(2 * k * p.T1 - math.log(2 * p.T1)),
        }
        return RegionBound(1, quad, LogScalar(k * L), steps)
    if region == 2:
        quad = log_integrate(_integrand(1, p), p.T1, p.T2)
        erf_step = math.log(c.b1) + 0.5 * math.log(L) + float(
            np.logaddexp(
                math.log(k * SQRT_PI) + k * k * L * L3 / (L3 - 4) + 0.5 * math.log(L),
                20 * k * math.sqrt(L),
            )
        )
        closed = LogScalar(math.log(2 * c.b1 * k * SQRT_PI) + 65 * k * k * L)
        return RegionBound(2, quad, closed, {"erf_bounded": LogScalar(erf_step)})
    if region == 3:
        quad = log_integrate(_integrand(2, p), p.T2, p.T3)
        gauss_step = LogScalar(math.log(256 * c.b2 * k * SQRT_PI) + math.log(L) + 64 * k * k * L)
        closed = LogScalar(math.log(256 * c.b2 * k * SQRT_PI) + 65 * k * k * L)
        return RegionBound(3, quad, closed, {"erf_bounded": gauss_step})
    if region == 4:
        split = 33 * (2 * k + 1)  # log of the split point e^{33(2k+1)}
        h = _integrand(3, p)

        def h_log(u: np.ndarray) -> np.ndarray:
            return h(np.exp(u)) + u

        log_t3 = math.log(p.T3)
        mid_closed = LogScalar(math.log(c.b3 / (132 * k)) + 11 * k * k * L)
        if log_t3 < split:
            mid_quad = log_integrate(h_log, log_t3, split)
        else:
            mid_quad = LogScalar.zero()
        mid = RegionBound(
            4, mid_quad, mid_closed,
            {"stated": LogScalar(math.log(c.b3 / (132 * k)) + 2 * math.log(L * L3) + k * L3 * L)},
        )
        lo_tail = max(split, log_t3)
        tail_quad = log_integrate(h_log, lo_tail, math.inf)
        # the stated simplification replaces V^{-V/33} by e^{-V(2k+1)} beyond the split
        simplified = log_integrate(lambda u: math.log(c.b3) - np.exp(u) + u, lo_tail, math.inf)
        tail = RegionBound(4, tail_quad, LogScalar(math.log(c.b3)), {"simplified_integrand": simplified})
        total_quad = mid_quad + tail_quad
        return RegionBound(
            4, total_quad, mid_closed + LogScalar(math.log(c.b3)), {},
            {"middle": mid, "tail": tail},
        )
    raise PreconditionError(f"region must be 1..4, got {region}")


def d3_coefficient(b1: float = 1.0, b2: float = 1.0, b3: float = 1.0) -> float:
    """Coefficient of k^2 (log T)^{65 k^2} in the D3(k) bound."""
    if min(b1, b2, b3) < 0:
        raise PreconditionError("b1, b2, b3 must be nonnegative")
    return 2 + 2 * b1 * SQRT_PI + 512 * b2 * SQRT_PI + 3 * b3


@dataclass(frozen=True)
class D3Chain:
    regions: dict[int, RegionBound]
    log_moment_quadrature: float
    log_moment_bound: float

    @property
    def holds(self) -> bool:
        return self.log_moment_quadrature <= self.log_moment_bound

    def to_dict(self) -> dict:
        return {
            "regions": {str(r): b.to_dict() for r, b in self.regions.items()},
            "log_moment_quadrature": self.log_moment_quadrature,
            "log_moment_bound": self.log_moment_bound,
            "holds": self.holds,
        }


def d3_chain(p: RegimeParams, enforce_regime: bool = True) -> D3Chain:
    """(1/T) int |zeta|^{2k} = 2k * sum of regions, against d3 * k^2 (log T)^{65k^2}."""
    regions = {r: region_integral(r, p, enforce_regime) for r in (1, 2, 3, 4)}
    total = LogScalar(math.log(2 * p.k)) * logsumexp(b.quadrature for b in regions.values())
    c = p.constants
    bound = math.log(d3_coefficient(c.b1, c.b2, c.b3) * p.k**2) + 65 * p.k**2 * p.L
    return D3Chain(regions, total.log_value, bound)


# -- lemma right-hand sides and side conditions ---------------------------------

# c2 = 2b holds exactly at the reference point; float rounding must not pass it
_STRICT = 1e-12


def c2_over_b_ok(hp: HarperParams) -> bool:
    return hp.c2 / hp.b > 2 * (1 + _STRICT)


def _inv_beta_term(hp: HarperParams, L: float, i: int) -> float:
    """beta_i^{-1} log(1/beta_i) / c4."""
    lb = log_beta(i, hp, L)
    return math.exp(-lb) * (-lb) / hp.c4


def lemma_rhs(label: str, hp: HarperParams, p: RegimeParams, j: int | None = None) -> LogScalar:
    """log of a lemma's right-hand side divided by T.

    Labels: ``T``, ``S0``, ``Sj``, ``T_moment``, ``Sj_moment``. ``Sj`` and
    ``Sj_moment`` take ``j`` with ``1 <= j <= J - 1``.
    """
    k, L = p.k, p.L
    c = p.constants
    base = k * k * L
    if label in ("Sj", "Sj_moment"):
        J = cap_index(hp, k, L)
        if j is None or not 1 <= j <= J - 1:
            raise PreconditionError(f"{label} needs 1 <= j <= J - 1 = {J - 1}, got {j}")
        decay = -_inv_beta_term(hp, L, j + 1)
        const = c.C2 if label == "Sj" else c.d2(k)
        return LogScalar.of(const) * LogScalar(decay + base)
    if label == "T":
        return LogScalar.of(c.C1) * LogScalar(base)
    if label == "T_moment":
        return LogScalar.of(c.d1(k)) * LogScalar(base)
    if label == "S0":
        return LogScalar.of(c.M) * LogScalar(-2 * L * L / hp.c1)
    raise PreconditionError(f"unknown lemma label {label!r}")


@dataclass(frozen=True)
class GeometricSumCheck:
    sum: LogScalar
    passes: bool
    hypothesis_ok: bool
    n_terms: int
    worst_j: int | None
    worst_log_term: float | None

    def to_dict(self) -> dict:
        return {
            "log_sum": self.sum.log_value,
            "passes": self.passes,
            "hypothesis_c2_over_b_gt_2": self.hypothesis_ok,
            "n_terms": self.n_terms,
            "worst_j": self.worst_j,
            "worst_log_term": self.worst_log_term,
        }


def geometric_log_terms(hp: HarperParams, k: float, L: float) -> list[float]:
    """log of e^{2k/beta_j} e^{-beta_{j+1}^{-1} log(1/beta_{j+1}) / c4}, j = 1..J-1."""
    J = cap_index(hp, k, L)
    return [
        2 * k * math.exp(-log_beta(j, hp, L)) - _inv_beta_term(hp, L, j + 1) for j in range(1, J)
    ]


def geometric_sum_check(hp: HarperParams, k: float, L: float) -> GeometricSumCheck:
    logs = geometric_log_terms(hp, k, L)
    total = logsumexp(LogScalar(v) for v in logs)
    worst = int(np.argmax(logs)) if logs else None
    return GeometricSumCheck(
        sum=total,
        passes=total.log_value <= 0.0,
        hypothesis_ok=c2_over_b_ok(hp),
        n_terms=len(logs),
        worst_j=None if worst is None else worst + 1,
        worst_log_term=None if worst is None else logs[worst],
    )


def s0_exponent_check(hp: HarperParams, k: float, L: float) -> bool:
    """sqrt((log T)^{65k^2 - 2L/c1}) <= (log T)^{k^2}."""
    return 65 * k * k - 2 * L / hp.c1 <= 2 * k * k


def index_bound_checks(hp: HarperParams, k: float, L: float) -> dict[str, bool]:
    """J - j against (1/beta_j)/log c1 and against log(1/beta_j)/log c1, all j.

    The first is the hypothesis as stated; the second is the form the
    argument actually uses. Both are reported.
    """
    J = cap_index(hp, k, L)
    lc1 = math.log(hp.c1)
    statement = proof = True
    for j in range(1, J):
        lb = log_beta(j, hp, L)
        statement &= J - j <= math.exp(-lb) / lc1
        proof &= J - j <= -lb / lc1
    return {"statement": bool(statement), "proof": bool(proof)}


@dataclass(frozen=True)
class CAssembly:
    total: LogScalar
    terms: dict[str, LogScalar]
    J: int
    log_beta_J: float
    hypotheses: dict[str, bool]
    warnings: tuple[str, ...]

    def recompute(self) -> LogScalar:
        return logsumexp(self.terms.values())

    def to_dict(self) -> dict:
        return {
            "log_C": self.total.log_value,
            "log_terms": {k: v.log_value for k, v in self.terms.items()},
            "J": self.J,
            "log_beta_J": self.log_beta_J,
            "hypotheses": dict(self.hypotheses),
            "warnings": list(self.warnings),
        }


def assemble_log_C(hp: HarperParams, p: RegimeParams) -> CAssembly:
    """C(k) = e^{2k/beta_J + 2kN} D1 + J e^{2kN} D2 + sqrt(D3 M), in log space."""
    k, L = p.k, p.L
    c = p.constants
    J = cap_index(hp, k, L)
    lbj = log_beta(J, hp, L)
    d3 = d3_coefficient(c.b1, c.b2, c.b3) * k * k
    terms = {
        "T": LogScalar(2 * k * math.exp(-lbj) + 2 * k * c.N) * LogScalar.of(c.d1(k)),
        "S_j": LogScalar(math.log(J) + 2 * k * c.N) * LogScalar.of(c.d2(k)),
        "S_0": (LogScalar.of(d3) * LogScalar.of(c.M)).sqrt(),
    }
    geo = geometric_sum_check(hp, k, L)
    hyps = {
        "regime": p.in_regime(),
        "c2_over_b_gt_2": c2_over_b_ok(hp),
        "geometric_sum_le_1": geo.passes,
        "s0_exponent": s0_exponent_check(hp, k, L),
        **{f"index_bound_{key}": v for key, v in index_bound_checks(hp, k, L).items()},
    }
    warns = tuple(f"hypothesis failed: {name}" for name, ok in hyps.items() if not ok)
    return CAssembly(logsumexp(terms.values()), terms, J, lbj, hyps, warns)


def dominance_L(hp: HarperParams, k: float) -> float:
    """Smallest convenient L in the regime where the beta-scale reaches its cap.

    Needs both L >= (10000 k)^2 and beta_1 = 1/L^2 <= e^{-c2 k}; taking
    L = max((10000 k)^2, e^{c2 k}) leaves about c2 k / log c1 scale steps.
    """
    return max((10000.0 * k) ** 2, math.exp(hp.c2 * k))


def dominance_ratio(hp: HarperParams, k: float, L: float | None = None,
                    constants: BoundConstants | None = None) -> float:
    """log log C(k) / k, to be compared with c2."""
    L = dominance_L(hp, k) if L is None else L
    asm = assemble_log_C(hp, RegimeParams(k, L, constants or BoundConstants()))
    return math.log(asm.total.log_value) / k
