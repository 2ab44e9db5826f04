"""Grid minimization of b = c1 (c1/(4 c3 - 2) + 1) under the Lemma-2.3 constraint.

Three mutually inconsistent forms of the constraint are in circulation, so
all three are implemented as variants:

* ``V1``: a = c1^{1-c3}, value k a^2/(a-1) e^{+c2 k (1-c3)}
* ``V2``: a = c1^{1-c3}, value k a^2/(a-1) e^{-c2 k (1-c3)}
* ``V3``: a = c1^{1-c4}, value k a^2/(a-1) e^{-a k (1-c4)}

A point satisfies a variant when 0 < value < 1/4. With a < 1 the factor
a^2/(a-1) is negative and the constraint says nothing; that is "vacuous".
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .asymptotic import index_bound_checks
from .errors import PreconditionError
from .partition import HarperParams

VARIANTS = ("V1", "V2", "V3")
C2_MARGIN = 1e-6
SIDE_L = 1e8
REFERENCE = (1.38, 0.56)

SATISFIED = "satisfied"
VIOLATED = "violated"
VACUOUS = "vacuous"


def _check_domain(c1, c3) -> None:
    if np.any(np.asarray(c1) <= 1):
        raise PreconditionError("need c1 > 1")
    c3 = np.asarray(c3)
    if np.any((c3 <= 0.5) | (c3 >= 1)):
        raise PreconditionError("need 1/2 < c3 < 1")


def b_value(c1, c3):
    """b = c1 (c1/(4 c3 - 2) + 1); broadcasts over arrays."""
    _check_domain(c1, c3)
    return c1 * (c1 / (4 * c3 - 2) + 1)


def _c4(c1, c3):
    return c1 / (4 * c3 - 2) + 1


def _a_and_exponent(variant: str, c1, c2, c3):
    """(a, lam) so that value = k a^2/(a-1) e^{-lam k}."""
    if variant == "V1":
        return c1 ** (1 - c3), -c2 * (1 - c3)
    if variant == "V2":
        return c1 ** (1 - c3), c2 * (1 - c3)
    if variant == "V3":
        c4 = _c4(c1, c3)
        a = c1 ** (1 - c4)
        return a, a * (1 - c4)
    raise PreconditionError(f"unknown constraint variant {variant!r}")


@dataclass(frozen=True)
class ConstraintValue:
    variant: str
    value: float
    a: float
    status: str

    def to_dict(self) -> dict:
        return asdict(self)


def _status(a, value):
    return np.where(a < 1, VACUOUS, np.where((value > 0) & (value < 0.25), SATISFIED, VIOLATED))


def constraint_value(variant: str, c1: float, c2: float, c3: float, k: float = 1) -> ConstraintValue:
    _check_domain(c1, c3)
    if c2 <= 0:
        raise PreconditionError("need c2 > 0")
    if k < 1:
        raise PreconditionError("need k >= 1")
    a, lam = _a_and_exponent(variant, c1, c2, c3)
    if a == 1:
        raise PreconditionError("a = 1: the constraint is singular")
    value = k * a * a / (a - 1) * math.exp(-lam * k)
    return ConstraintValue(variant, value, a, str(_status(a, value)))


def _constraint_arrays(variant: str, c1: np.ndarray, c2: np.ndarray, c3: np.ndarray, k: float):
    a, lam = _a_and_exponent(variant, c1, c2, c3)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        value = k * a * a / (a - 1) * np.exp(-lam * k)
    return a, value


@dataclass(frozen=True)
class WorstK:
    k: float
    lam: float
    diverges: bool


def worst_k_for_lambda(lam: float) -> WorstK:
    """argmax over k >= 1 of k e^{-lam k}: 1/lam clamped to 1; lam <= 0 diverges."""
    if lam <= 0:
        return WorstK(math.inf, lam, True)
    return WorstK(max(1.0, 1.0 / lam), lam, False)


def worst_k(variant: str, c1: float, c2: float, c3: float) -> WorstK:
    _check_domain(c1, c3)
    _, lam = _a_and_exponent(variant, c1, c2, c3)
    return worst_k_for_lambda(float(lam))


# -- grid search ----------------------------------------------------------------

def axis(rng: tuple[float, float], step: float, open_hi: bool) -> np.ndarray:
    """Points lo + i*step in (lo, hi] (or (lo, hi) if ``open_hi``).

    A degenerate range lo == hi is the single point lo.
    """
    lo, hi = rng
    if hi < lo:
        raise PreconditionError(f"empty range {rng}")
    if hi == lo:
        return np.array([float(lo)])
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = np.round(lo + step * np.arange(1, n + 1), 12)
    return pts[pts < hi] if open_hi else pts[pts <= hi]


def _cap_index_vec(c1: np.ndarray, c2: np.ndarray, k: float, L: float) -> np.ndarray:
    lc1 = np.log(c1)
    two_log_l = 2 * math.log(L)
    slack = two_log_l - c2 * k
    i = np.where(slack < 0, 0, 1 + np.floor(np.maximum(slack, 0) / lc1)).astype(np.int64)

    def ok(idx):
        return (idx == 0) | ((idx - 1) * lc1 - two_log_l <= -c2 * k)

    i = np.where((i > 0) & ~ok(i), i - 1, i)
    i = np.where(ok(i + 1), i + 1, i)
    return i + 1


def side_conditions(c1: np.ndarray, c3: np.ndarray, c2: np.ndarray, ks: Sequence[float],
                    L: float = SIDE_L) -> dict[str, np.ndarray]:
    """Vectorized side conditions; the J - j bounds hold for all 1 <= j <= J-1.

    Under the log(1/beta_j) reading, J - j <= (2 log L - (j-1) log c1)/log c1
    reduces to (J-1) log c1 <= 2 log L, free of j. The 1/beta_j reading
    follows from it because x >= log x.
    """
    lc1 = np.log(c1)
    b = b_value(c1, c3)
    proof = np.ones(c1.shape, dtype=bool)
    for k in ks:
        J = _cap_index_vec(c1, c2, k, L)
        proof &= (J - 1) * lc1 <= 2 * math.log(L) * (1 + 1e-12)
    statement = proof.copy()
    for idx in np.flatnonzero(~proof):
        p = HarperParams(float(c1.flat[idx]), float(c2.flat[idx]), float(c3.flat[idx]))
        statement.flat[idx] = all(index_bound_checks(p, k, L)["statement"] for k in ks)
    return {
        "log_c1_lt_half_c1": lc1 < c1 / 2,
        "c2_over_b_gt_2": c2 / b > 2,
        "c1_lt_100": c1 < 100,
        "index_bound_statement": statement,
        "index_bound_proof": proof,
    }


@dataclass
class VariantResult:
    variant: str
    feasible: bool
    b_min: float | None = None
    c1: float | None = None
    c3: float | None = None
    c2: float | None = None
    n_feasible: int = 0
    refinement: list[dict] = field(default_factory=list)
    recheck: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimizationReport:
    grid: dict
    variants: dict[str, VariantResult]
    reference: dict
    min_b_c1_ge_20: float | None
    monotone_b: bool
    n_points: int

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "variants": {v: r.to_dict() for v, r in self.variants.items()},
            "reference": self.reference,
            "min_b_c1_ge_20": self.min_b_c1_ge_20,
            "monotone_b": self.monotone_b,
            "n_points": self.n_points,
        }


def _feasible(variant: str, c1: np.ndarray, c3: np.ndarray, ks: Sequence[float]):
    b = b_value(c1, c3)
    c2 = 2 * b * (1 + C2_MARGIN)
    ok = np.ones(c1.shape, dtype=bool)
    for k in ks:
        a, val = _constraint_arrays(variant, c1, c2, c3, k)
        ok &= (a > 1) & (val > 0) & (val < 0.25)
    for flag in side_conditions(c1, c3, c2, ks).values():
        ok &= flag
    return b, c2, ok


def _argmin(b: np.ndarray, c1: np.ndarray, c3: np.ndarray, ok: np.ndarray) -> int | None:
    if not ok.any():
        return None
    idx = np.flatnonzero(ok)
    order = np.lexsort((c3[idx], c1[idx], b[idx]))
    return int(idx[order[0]])


def _mesh(c1_axis: np.ndarray, c3_axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g1, g3 = np.meshgrid(c1_axis, c3_axis, indexing="ij")
    return g1.ravel(), g3.ravel()


def _monotone(c1_axis: np.ndarray, c3_axis: np.ndarray) -> bool:
    g1, g3 = np.meshgrid(c1_axis, c3_axis, indexing="ij")
    b = b_value(g1, g3)
    inc_c1 = b.shape[0] < 2 or bool(np.all(np.diff(b, axis=0) > 0))
    dec_c3 = b.shape[1] < 2 or bool(np.all(np.diff(b, axis=1) < 0))
    return inc_c1 and dec_c3


def _search_variant(variant: str, c1_grid, c3_grid, c1_range, c3_range, step, ks) -> VariantResult:
    b, c2, ok = _feasible(variant, c1_grid, c3_grid, ks)
    best = _argmin(b, c1_grid, c3_grid, ok)
    res = VariantResult(variant, best is not None, n_feasible=int(ok.sum()))
    if best is None:
        return res
    cur = (float(c1_grid[best]), float(c3_grid[best]), float(b[best]), float(c2[best]))
    res.refinement.append({"step": step, "c1": cur[0], "c3": cur[1], "b": cur[2]})
    fine = step
    for _ in range(2):
        width, fine = fine, fine / 10
        lo1 = max(c1_range[0], cur[0] - width)
        hi1 = min(c1_range[1], cur[0] + width)
        lo3 = max(c3_range[0], cur[1] - width)
        hi3 = min(c3_range[1], cur[1] + width)
        a1 = np.concatenate([axis((lo1, hi1), fine, open_hi=False), [cur[0]]])
        a3 = np.concatenate([axis((lo3, hi3), fine, open_hi=(hi3 == c3_range[1])), [cur[1]]])
        a1 = np.unique(a1[(a1 > c1_range[0]) | (c1_range[0] == c1_range[1])])
        a3 = np.unique(a3[((a3 > c3_range[0]) & (a3 < c3_range[1])) | (c3_range[0] == c3_range[1])])
        g1, g3 = _mesh(a1, a3)
        bb, cc2, okk = _feasible(variant, g1, g3, ks)
        j = _argmin(bb, g1, g3, okk)
        if j is not None and (bb[j], g1[j], g3[j]) < (cur[2], cur[0], cur[1]):
            cur = (float(g1[j]), float(g3[j]), float(bb[j]), float(cc2[j]))
        res.refinement.append({"step": fine, "c1": cur[0], "c3": cur[1], "b": cur[2]})
    res.c1, res.c3, res.b_min, res.c2 = cur
    hp = HarperParams(cur[0], cur[3], cur[1])
    res.recheck = {
        "constraint": {str(k): constraint_value(variant, cur[0], cur[3], cur[1], k).status for k in ks},
        "index_bound": {str(k): index_bound_checks(hp, k, SIDE_L) for k in ks},
        "worst_k": asdict(worst_k(variant, cur[0], cur[3], cur[1])),
    }
    return res


def grid_search(
    variants: Iterable[str] = VARIANTS,
    c1_range: tuple[float, float] = (1.0, 20.0),
    c3_range: tuple[float, float] = (0.5, 1.0),
    step: float = 0.01,
    k_set: Sequence[float] = (1,),
) -> OptimizationReport:
    """Exhaustive scan of c1 in (lo, hi], c3 in (lo, hi), then two refinements."""
    if not step > 0:
        raise PreconditionError(f"step must be positive, got {step}")
    variants = list(variants)
    for v in variants:
        if v not in VARIANTS:
            raise PreconditionError(f"unknown constraint variant {v!r}")
    ks = tuple(float(k) for k in k_set)
    if not ks or min(ks) < 1:
        raise PreconditionError("k_set must be nonempty with every k >= 1")
    c1_axis = axis(c1_range, step, open_hi=False)
    c3_axis = axis(c3_range, step, open_hi=c3_range[0] != c3_range[1])
    if c1_axis.size == 0 or c3_axis.size == 0:
        raise PreconditionError("grid is empty; step exceeds the range")
    _check_domain(c1_axis, c3_axis)
    c1_grid, c3_grid = _mesh(c1_axis, c3_axis)
    b = b_value(c1_grid, c3_grid)
    big = c1_grid >= 20
    results = {v: _search_variant(v, c1_grid, c3_grid, c1_range, c3_range, step, ks) for v in variants}

    r1, r3 = REFERENCE
    rb = float(b_value(r1, r3))
    rc2 = 2 * rb
    on_grid = bool(np.any(np.isclose(c1_grid, r1, rtol=0, atol=1e-9) & np.isclose(c3_grid, r3, rtol=0, atol=1e-9)))
    reference = {
        "c1": r1,
        "c3": r3,
        "b": rb,
        "c2": rc2,
        "on_grid": on_grid,
        "constraints": {v: constraint_value(v, r1, rc2, r3, 1).to_dict() for v in VARIANTS},
    }
    grid = {
        "c1_range": list(c1_range),
        "c3_range": list(c3_range),
        "step": step,
        "k_set": list(ks),
        "c2_margin": C2_MARGIN,
        "side_L": SIDE_L,
    }
    return OptimizationReport(
        grid=grid,
        variants=results,
        reference=reference,
        min_b_c1_ge_20=float(b[big].min()) if big.any() else None,
        monotone_b=_monotone(c1_axis, c3_axis),
        n_points=int(c1_grid.size),
    )
