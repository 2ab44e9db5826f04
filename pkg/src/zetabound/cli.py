"""zetabound command line.

Usage:
    zetabound optimize --variant V2 --step 0.01
    zetabound constants --k 2
    zetabound moments --k 1 --T 1e6 --n 200000 --seed 0
    zetabound large-values --T 1e5 --V 0 1 2 --n 50000
    zetabound partition --T 1e4 --betas 0.1 0.2 --n 1000
    zetabound verify-majorant --T 1e6 --n 10000
    zetabound bounds --k 1 --L 1e8
    zetabound d3 --b1 1 --b2 1 --b3 1
    zetabound coscheck --primes 2 2 3 3 --T-int 1e5

Every command writes a key: value report to stdout and, with --output, a
JSON document {command, config, results, warnings, timestamp}. Options may
also come from a flat ``key = value`` file given by --config; flags on the
command line win. Exit status is 0 on success, 1 on bad input, and 2 when
--check is given and the command's acceptance check fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .errors import ZetaBoundError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2

CONSTANT_NAMES = ("N", "M", "C1", "C2", "b1", "b2", "b3", "D1", "D2")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- report plumbing ---------------------------------------------------------------

def jsonable(obj: Any) -> Any:
    """Plain JSON types only; non-finite floats become strings."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out += flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out += flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    lines += [f"config.{k}: {v}" for k, v in flatten(report["config"])]
    lines += [f"{k}: {v}" for k, v in flatten(report["results"])]
    lines += [f"warning: {w}" for w in report["warnings"]]
    lines.append(f"timestamp: {report['timestamp']}")
    return "\n".join(lines) + "\n"


def _constants(args):
    from .asymptotic import BoundConstants

    kw = {n: getattr(args, n) for n in CONSTANT_NAMES if getattr(args, n) is not None}
    return BoundConstants(**kw)


def _check(ok: bool, what: str, checks: dict[str, bool]) -> None:
    checks[what] = bool(ok)


# -- commands ----------------------------------------------------------------------

def cmd_optimize(args, checks):
    from .optimizer import grid_search

    rep = grid_search(
        variants=args.variant,
        c1_range=(args.c1_lo, args.c1_hi),
        c3_range=(args.c3_lo, args.c3_hi),
        step=args.step,
        k_set=args.k,
    )
    out = rep.to_dict()
    ref = rep.reference
    _check(abs(ref["b"] - 9.315) <= 1e-3, "reference_b", checks)
    if rep.min_b_c1_ge_20 is not None:
        _check(rep.min_b_c1_ge_20 >= 220, "c1_ge_20_excluded", checks)
    if "V2" in rep.variants:
        _check(ref["constraints"]["V2"]["status"] == "satisfied", "reference_feasible_V2", checks)
    return out


def cmd_constants(args, checks):
    from .keating_snaith import moment_constant

    res = moment_constant(args.k, args.prime_cutoff, args.matrix_cutoff)
    if res.f_k_closed is not None and res.f_k_closed != 0:
        rel = abs(res.f_k_extrapolated - float(res.f_k_closed)) / float(res.f_k_closed)
        _check(rel < 0.01, "extrapolation_within_1pct", checks)
    return res.to_dict()


def cmd_moments(args, checks):
    from .moments import fourth_moment_leading, moment_mc, moment_quadrature, second_moment_mean

    if args.method == "quadrature":
        est = moment_quadrature(int(args.k), args.T, args.step)
    else:
        est = moment_mc(args.k, args.T, args.n, args.seed, args.jobs, args.cache)
    out = {"estimate": est.to_dict()}
    if args.k == 1:
        oracle = second_moment_mean(args.T)
        out["oracle_second_moment"] = oracle
        tol = 0.01 * oracle if est.method == "quadrature" else 4 * est.std_error
        _check(abs(est.value - oracle) <= tol, "matches_second_moment_oracle", checks)
    elif args.k == 2:
        lead = fourth_moment_leading(args.T)
        out["fourth_moment_leading"] = lead
        out["ratio_to_leading"] = est.value / lead
        _check(0.5 <= est.value / lead <= 2.0, "fourth_moment_band", checks)
    return out


def cmd_large_values(args, checks):
    from .moments import large_value_curve

    curve = large_value_curve(args.T, args.V, args.n, args.seed, args.jobs, args.cache)
    order = np.argsort(args.V, kind="stable")
    fr = [curve[i].fraction for i in order]
    _check(all(a >= b for a, b in zip(fr, fr[1:])), "nonincreasing_in_V", checks)
    return {"curve": [c.to_dict() for c in curve]}


def cmd_partition(args, checks):
    from .partition import (BetaSequence, HarperParams, PartitionLabel, cap_index, classify_codes,
                            estimate_measures, log_beta, satisfies)

    out: dict[str, Any] = {}
    hp = HarperParams(args.c1, args.c2, args.c3)
    J = cap_index(hp, args.k, args.L)
    lbj = log_beta(J, hp, args.L)
    out["harper"] = {
        "J": J,
        "log_beta_J": lbj,
        "beta_J_le_c1_cap": lbj <= math.log(args.c1) - args.c2 * args.k,
    }
    thresholds = None
    if args.threshold_scale != 1.0:
        thresholds = [args.threshold_scale * b ** -args.c3 for b in args.betas]
    seq = BetaSequence.toy(args.betas, args.c3, thresholds)
    rep = estimate_measures(seq, args.T, args.n, args.seed, args.jobs)
    out["measures"] = rep.to_dict()
    rng = np.random.default_rng(args.seed)
    t = args.T + args.T * rng.random(args.n)
    codes = classify_codes(seq, args.T, t)
    n_check = min(args.n, args.verify)
    bad = 0
    for ti, c in zip(t[:n_check].tolist(), codes[:n_check].tolist()):
        label = PartitionLabel(None if c < 0 else int(c))
        bad += not satisfies(label, ti, seq, args.T)
    out["consistency"] = {"checked": n_check, "inconsistent": bad}
    _check(bad == 0, "labels_consistent", checks)
    _check(abs(sum(rep.fractions.values()) - 1) < 1e-12, "fractions_sum_to_1", checks)
    return out


def cmd_verify_majorant(args, checks):
    from .dirichlet import OutOfRegimeWarning, majorant_rhs
    from .moments import sample_abs_zeta, stratified_points
    from .zeta import NEAR_ZERO_ABS, NEAR_ZERO_SENTINEL

    N = 0.0 if args.N is None else args.N
    x = args.T**args.x_exponent
    t = stratified_points(args.T, args.n, args.seed)
    mag = sample_abs_zeta(t, args.jobs, args.cache)
    log_z = np.where(mag < NEAR_ZERO_ABS, NEAR_ZERO_SENTINEL, np.log(np.maximum(mag, 1e-300)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfRegimeWarning)
        rhs = majorant_rhs(t, x, args.T, N)
    gap = rhs - log_z
    q = np.percentile(gap, [1, 5, 50])
    out = {
        "x": x,
        "N": N,
        "n": int(args.n),
        "gap_min": float(gap.min()),
        "gap_p1": float(q[0]),
        "gap_p5": float(q[1]),
        "gap_median": float(q[2]),
        "share_negative": float(np.mean(gap < 0)),
    }
    _check(q[0] > -5, "gap_p1_gt_minus_5", checks)
    return out


def cmd_bounds(args, checks):
    from .asymptotic import (RegimeParams, assemble_log_C, geometric_sum_check, index_bound_checks,
                             lemma_rhs, region_integral, s0_exponent_check)
    from .partition import HarperParams, cap_index

    hp = HarperParams(args.c1, args.c2, args.c3)
    p = RegimeParams(args.k, args.L, _constants(args))
    J = cap_index(hp, args.k, args.L)
    regions = {str(r): region_integral(r, p, enforce_regime=not args.no_regime_check).to_dict()
               for r in (1, 2, 3, 4)}
    lemmas = {lab: lemma_rhs(lab, hp, p).log_value for lab in ("T", "S0", "T_moment")}
    if J >= 2:
        for lab in ("Sj", "Sj_moment"):
            lemmas[f"{lab}(1)"] = lemma_rhs(lab, hp, p, 1).log_value
            lemmas[f"{lab}({J - 1})"] = lemma_rhs(lab, hp, p, J - 1).log_value
    geo = geometric_sum_check(hp, args.k, args.L)
    asm = assemble_log_C(hp, p)
    for w in asm.warnings:
        warnings.warn(w)
    out = {
        "J": J,
        "regions": regions,
        "log_lemma_rhs": lemmas,
        "geometric_sum": geo.to_dict(),
        "s0_exponent_check": s0_exponent_check(hp, args.k, args.L),
        "index_bounds": index_bound_checks(hp, args.k, args.L),
        "assembly": asm.to_dict(),
    }
    for r in ("2", "3", "4"):
        _check(regions[r]["holds"], f"region_{r}_quadrature_le_closed_form", checks)
    _check(geo.passes, "geometric_sum_le_1", checks)
    _check(out["s0_exponent_check"], "s0_exponent", checks)
    return out


def cmd_d3(args, checks):
    from .asymptotic import RegimeParams, d3_chain, d3_coefficient

    c = _constants(args)
    coef = d3_coefficient(c.b1, c.b2, c.b3)
    out: dict[str, Any] = {"b1": c.b1, "b2": c.b2, "b3": c.b3, "coefficient": coef}
    if args.chain:
        chain = d3_chain(RegimeParams(args.k, args.L, c), enforce_regime=not args.no_regime_check)
        out["chain"] = chain.to_dict()
        _check(chain.holds, "moment_quadrature_le_d3_bound", checks)
    return out


def cmd_coscheck(args, checks):
    from .dirichlet import cos_product_mean, f_of_n

    mean = cos_product_mean(args.primes, args.T_int, args.method)
    f = f_of_n(math.prod(args.primes))
    out = {"primes": list(args.primes), "T_int": args.T_int, "mean": mean, "f": f,
           "abs_diff": abs(mean - float(f))}
    _check(out["abs_diff"] <= args.tol, "mean_matches_f", checks)
    return out


COMMANDS: dict[str, Callable] = {
    "optimize": cmd_optimize,
    "constants": cmd_constants,
    "moments": cmd_moments,
    "large-values": cmd_large_values,
    "partition": cmd_partition,
    "verify-majorant": cmd_verify_majorant,
    "bounds": cmd_bounds,
    "d3": cmd_d3,
    "coscheck": cmd_coscheck,
}


# -- parser ------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", type=str, default=None, help="write the JSON report here")
    g.add_argument("--config", type=str, default=None, help="flat key = value file")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--check", action="store_true", help="exit 2 if the acceptance check fails")
    g.add_argument("--cache", type=str, default=None, help="CSV cache of zeta samples")
    for name in CONSTANT_NAMES:
        g.add_argument(f"--{name}", type=float, default=None)
    return p


def _harper_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c1", type=float, default=1.38)
    p.add_argument("--c2", type=float, default=18.63)
    p.add_argument("--c3", type=float, default=0.56)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetabound", description="Numerical checks for zeta moment bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _common()

    p = sub.add_parser("optimize", parents=[common], help="grid search for the smallest b")
    p.add_argument("--variant", nargs="+", default=["V1", "V2", "V3"], choices=["V1", "V2", "V3"])
    p.add_argument("--c1-lo", type=float, default=1.0)
    p.add_argument("--c1-hi", type=float, default=20.0)
    p.add_argument("--c3-lo", type=float, default=0.5)
    p.add_argument("--c3-hi", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--k", type=float, nargs="+", default=[1.0])

    p = sub.add_parser("constants", parents=[common], help="moment constants c_k = a_k f_k")
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--prime-cutoff", type=int, default=10**6)
    p.add_argument("--matrix-cutoff", type=int, default=2000)

    p = sub.add_parser("moments", parents=[common], help="mean of |zeta|^{2k} over [T, 2T]")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1e6)
    p.add_argument("--n", type=int, default=200_000)
    p.add_argument("--method", choices=["mc", "quadrature"], default="mc")
    p.add_argument("--step", type=float, default=0.02)

    p = sub.add_parser("large-values", parents=[common], help="share of [T, 2T] with log|zeta| >= V")
    p.add_argument("--T", type=float, default=1e5)
    p.add_argument("--V", type=float, nargs="+", default=[0.0, 1.0, 2.0])
    p.add_argument("--n", type=int, default=50_000)

    p = sub.add_parser("partition", parents=[common], help="classify t into the T / S(j) cover")
    _harper_args(p)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--L", type=float, default=1e8)
    p.add_argument("--T", type=float, default=1e4)
    p.add_argument("--betas", type=float, nargs="+", default=[0.1, 0.2])
    p.add_argument("--threshold-scale", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--verify", type=int, default=1000, help="points re-checked by predicate")

    p = sub.add_parser("verify-majorant", parents=[common], help="majorant minus log|zeta| statistics")
    p.add_argument("--T", type=float, default=1e6)
    p.add_argument("--x-exponent", type=float, default=0.25)
    p.add_argument("--n", type=int, default=10_000)

    p = sub.add_parser("bounds", parents=[common], help="asymptotic bounds chain in log space")
    _harper_args(p)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--L", type=float, default=1e8)
    p.add_argument("--no-regime-check", action="store_true")

    p = sub.add_parser("d3", parents=[common], help="D3 coefficient and optional integral chain")
    p.add_argument("--chain", action="store_true")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--L", type=float, default=1e8)
    p.add_argument("--no-regime-check", action="store_true")

    p = sub.add_parser("coscheck", parents=[common], help="mean of prod cos(t log p)")
    p.add_argument("--primes", type=int, nargs="+", default=[2, 2])
    p.add_argument("--T-int", type=float, default=1e4)
    p.add_argument("--method", choices=["auto", "exact", "quadrature"], default="auto")
    p.add_argument("--tol", type=float, default=1e-3)
    return parser


def read_config(path: str | Path) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ZetaBoundError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _coerce_config(sub: argparse.ArgumentParser, cfg: dict[str, str]) -> dict[str, Any]:
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for key, raw in cfg.items():
        if key in ("config", "help") or key not in actions:
            raise ZetaBoundError(f"unknown config key {key!r}")
        act = actions[key]
        if isinstance(act, argparse._StoreTrueAction):
            val: Any = raw.lower() in ("1", "true", "yes", "on")
        else:
            conv = act.type or str
            items = raw.split() if act.nargs in ("+", "*") else [raw]
            vals = [conv(v) for v in items]
            for v in vals:
                if act.choices is not None and v not in act.choices:
                    raise ZetaBoundError(f"config {key}: {v!r} not in {list(act.choices)}")
            val = vals if act.nargs in ("+", "*") else vals[0]
        out[key] = val
    return out


def parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if known.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**_coerce_config(sub, read_config(known.config)))
        args = parser.parse_args(argv)
    return args


def resolved_config(args: argparse.Namespace) -> dict[str, Any]:
    # jobs changes wall time only, so it stays out of the byte-compared report
    skip = {"command", "output", "config", "check", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv: list[str]) -> int:
    try:
        args = parse(argv)
    except ZetaBoundError as exc:
        print(f"zetabound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    checks: dict[str, bool] = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            results = COMMANDS[args.command](args, checks)
        except (ZetaBoundError, ValueError, OverflowError) as exc:
            print(f"zetabound {args.command}: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if checks:
        results = {**results, "checks": checks}
    report = {
        "command": args.command,
        "config": jsonable(resolved_config(args)),
        "results": jsonable(results),
        "warnings": sorted({str(w.message) for w in caught}),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    sys.stdout.write(render_text(report))
    if args.output:
        Path(args.output).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.check and not all(checks.values()):
        failed = [k for k, ok in checks.items() if not ok]
        print(f"zetabound {args.command}: check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
