"""Harper's beta-scale, the cap index, and the T / S(j) cover of [T, 2T].

The scale is ``beta_0 = 0`` and ``beta_i = c1^(i-1) / L^2`` with ``L = loglog T``;
it is cut off at the cap index ``J = 1 + max{i : beta_i <= exp(-c2 k)}``.
A point ``t`` belongs to

* ``S(j)`` when all rows ``i <= j`` pass, ``|Re G_(i,l)(t)| <= beta_i^-c3`` for
  every ``i <= l <= J``, and row ``j + 1`` fails for some ``l``;
* ``T`` (here ``Tcal``) when ``|Re G_(i,J)(t)| <= beta_i^-c3`` for every ``i``.

These sets cover [T, 2T] but need not be disjoint. ``classify`` resolves the
overlap by letting the smallest failing row win, with ``Tcal`` as fallback.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dirichlet import SmoothedPolyConfig, g_sum, prime_poly
from .errors import PreconditionError
from .primes import DEFAULT_CAPACITY


@dataclass(frozen=True)
class HarperParams:
    c1: float
    c2: float
    c3: float

    def __post_init__(self) -> None:
        if not 1 < self.c1 < 100:
            raise PreconditionError(f"need 1 < c1 < 100, got {self.c1}")
        if not 0.5 < self.c3 < 1:
            raise PreconditionError(f"need 1/2 < c3 < 1, got {self.c3}")
        if not self.c2 > 0:
            raise PreconditionError(f"need c2 > 0, got {self.c2}")

    @property
    def c4(self) -> float:
        return self.c1 / (4 * self.c3 - 2) + 1

    @property
    def b(self) -> float:
        return self.c1 * self.c4


def beta(i: int, params: HarperParams, L: float) -> float:
    if i < 0:
        raise PreconditionError("beta index must be >= 0")
    if i == 0:
        return 0.0
    return params.c1 ** (i - 1) / L**2


def log_beta(i: int, params: HarperParams, L: float) -> float:
    """log beta_i for i >= 1, safe when beta_i underflows."""
    if i < 1:
        raise PreconditionError("log_beta needs i >= 1")
    return (i - 1) * math.log(params.c1) - 2 * math.log(L)


def cap_index(params: HarperParams, k: float, L: float) -> int:
    """J = 1 + max{i >= 0 : beta_i <= exp(-c2 k)}; always >= 1."""
    if L < 3:
        raise PreconditionError(f"cap_index needs L >= 3, got {L}")
    bound = -params.c2 * k

    def ok(i: int) -> bool:
        return i == 0 or log_beta(i, params, L) <= bound

    slack = 2 * math.log(L) - params.c2 * k
    if slack < 0:
        i = 0
    else:
        i = 1 + math.floor(slack / math.log(params.c1))
    # floor() of a rounded ratio can be off by one either way
    while i > 0 and not ok(i):
        i -= 1
    while ok(i + 1):
        i += 1
    return i + 1


@dataclass(frozen=True)
class BetaSequence:
    """beta_1..beta_J with per-row thresholds beta_i^-c3.

    Build with :meth:`harper` from parameters, or :meth:`toy` from an explicit
    list when the real scale is too fine for any desk-scale T.
    """

    betas: tuple[float, ...]
    c3: float
    thresholds: tuple[float, ...]
    params: HarperParams | None = None
    L: float | None = None
    k: float | None = None

    def __post_init__(self) -> None:
        if not self.betas:
            raise PreconditionError("beta sequence must have at least one entry")
        if any(b <= 0 for b in self.betas) or any(
            b2 <= b1 for b1, b2 in zip(self.betas, self.betas[1:])
        ):
            raise PreconditionError("betas must be positive and strictly increasing")
        if len(self.thresholds) != len(self.betas):
            raise PreconditionError("one threshold per beta required")

    @classmethod
    def harper(cls, params: HarperParams, L: float, k: float) -> "BetaSequence":
        J = cap_index(params, k, L)
        betas = tuple(beta(i, params, L) for i in range(1, J + 1))
        return cls(betas, params.c3, tuple(b ** -params.c3 for b in betas), params, L, k)

    @classmethod
    def toy(
        cls, betas: Sequence[float], c3: float, thresholds: Sequence[float] | None = None
    ) -> "BetaSequence":
        betas = tuple(float(b) for b in betas)
        if thresholds is None:
            thresholds = tuple(b**-c3 for b in betas)
        return cls(betas, float(c3), tuple(float(x) for x in thresholds))

    @property
    def J(self) -> int:
        return len(self.betas)

    def beta_at(self, i: int) -> float:
        return 0.0 if i == 0 else self.betas[i - 1]


@dataclass(frozen=True)
class PartitionLabel:
    """``j is None`` stands for Tcal; otherwise the label is S(j)."""

    j: int | None = None

    @property
    def is_tcal(self) -> bool:
        return self.j is None

    def __str__(self) -> str:
        return "T" if self.j is None else f"S({self.j})"


TCAL = PartitionLabel(None)


def _config(seq: BetaSequence, T: float, i: int, l: int, capacity: int) -> SmoothedPolyConfig:
    return SmoothedPolyConfig(T, seq.beta_at(i - 1), seq.beta_at(i), seq.beta_at(l), capacity)


def row_values(seq: BetaSequence, T: float, i: int, t, capacity: int = DEFAULT_CAPACITY) -> np.ndarray:
    """|Re G_(i,l)(t)| for l = i..J, shape (len(t), J - i + 1)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    cfgs = [_config(seq, T, i, l, capacity) for l in range(i, seq.J + 1)]
    primes = cfgs[0].primes()
    if primes.size == 0:
        return np.zeros((t.size, len(cfgs)))
    log_p = np.log(primes.astype(np.float64))
    weights = np.stack([c.weights(primes)[1] for c in cfgs], axis=1)
    cos = np.cos(t[:, None] * log_p[None, :])
    return np.abs(cos @ weights)


def classify_codes(seq: BetaSequence, T: float, t, capacity: int = DEFAULT_CAPACITY) -> np.ndarray:
    """Vectorised classifier: -1 for Tcal, j for S(j)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    codes = np.full(t.size, -1, dtype=np.int64)
    open_ = np.ones(t.size, dtype=bool)
    for i in range(1, seq.J + 1):
        if not open_.any():
            break
        idx = np.flatnonzero(open_)
        vals = row_values(seq, T, i, t[idx], capacity)
        failed = np.any(vals > seq.thresholds[i - 1], axis=1)
        codes[idx[failed]] = i - 1
        open_[idx[failed]] = False
    return codes


def classify(t: float, seq: BetaSequence, T: float, capacity: int = DEFAULT_CAPACITY) -> PartitionLabel:
    code = int(classify_codes(seq, T, [t], capacity)[0])
    return TCAL if code < 0 else PartitionLabel(code)


# Direct predicates, evaluated term by term through g_sum. They share no code
# with classify_codes beyond the polynomial definition and serve to re-check it.

def _row_ok(seq: BetaSequence, T: float, i: int, t: float, ls, capacity: int) -> bool:
    thr = seq.thresholds[i - 1]
    return all(abs(g_sum(_config(seq, T, i, l, capacity), t).real) <= thr for l in ls)


def in_tcal(t: float, seq: BetaSequence, T: float, capacity: int = DEFAULT_CAPACITY) -> bool:
    return all(_row_ok(seq, T, i, t, [seq.J], capacity) for i in range(1, seq.J + 1))


def in_s(j: int, t: float, seq: BetaSequence, T: float, capacity: int = DEFAULT_CAPACITY) -> bool:
    if not 0 <= j < seq.J:
        raise PreconditionError(f"S(j) needs 0 <= j < J = {seq.J}")
    rows = range(1, j + 1)
    if not all(_row_ok(seq, T, i, t, range(i, seq.J + 1), capacity) for i in rows):
        return False
    return not _row_ok(seq, T, j + 1, t, range(j + 1, seq.J + 1), capacity)


def satisfies(label: PartitionLabel, t: float, seq: BetaSequence, T: float,
              capacity: int = DEFAULT_CAPACITY) -> bool:
    if label.is_tcal:
        return in_tcal(t, seq, T, capacity)
    return in_s(label.j, t, seq, T, capacity)


@dataclass
class MeasureReport:
    T: float
    n_samples: int
    seed: int
    counts: dict[str, int]
    fractions: dict[str, float] = field(default_factory=dict)
    std_errors: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "counts": dict(self.counts),
            "fractions": dict(self.fractions),
            "std_errors": dict(self.std_errors),
        }


def _label_key(code: int) -> str:
    return "T" if code < 0 else f"S({code})"


def estimate_measures(
    seq: BetaSequence,
    T: float,
    n_samples: int,
    seed: int = 0,
    jobs: int = 1,
    chunk: int = 4096,
    capacity: int = DEFAULT_CAPACITY,
) -> MeasureReport:
    """Uniform-sample estimate of the share of [T, 2T] carried by each label.

    All samples are drawn up front from one seeded generator and split into
    fixed-size chunks, so the result does not depend on ``jobs``.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    t = T + T * rng.random(n_samples)
    pieces = [t[s : s + chunk] for s in range(0, n_samples, chunk)]
    run = lambda piece: classify_codes(seq, T, piece, capacity)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(run, pieces))
    else:
        codes = [run(p) for p in pieces]
    counter = Counter(int(c) for c in np.concatenate(codes))
    keys = [-1] + list(range(seq.J))
    counts = {_label_key(c): counter.get(c, 0) for c in keys}
    fractions = {key: v / n_samples for key, v in counts.items()}
    errors = {key: math.sqrt(p * (1 - p) / n_samples) for key, p in fractions.items()}
    return MeasureReport(T, n_samples, seed, counts, fractions, errors)
