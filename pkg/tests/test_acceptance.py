"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends
with one PASS/FAIL line per criterion.
"""
import json
import math
import re
import time
from fractions import Fraction

import numpy as np
import pytest

from zetabound.asymptotic import (RegimeParams, d3_coefficient, geometric_sum_check,
                                  region_integral, s0_exponent_check)
from zetabound.cli import main
from zetabound.dirichlet import cos_product_mean, f_of_n
from zetabound.keating_snaith import arithmetic_factor, moment_constant, rmt_factor
from zetabound.moments import (fourth_moment_leading, moment_quadrature, second_moment_mean)
from zetabound.optimizer import axis, b_value, constraint_value, grid_search
from zetabound.partition import (TCAL, BetaSequence, HarperParams, PartitionLabel, beta,
                                 cap_index, classify_codes, satisfies)
from zetabound.primes import mertens_window

crit = pytest.mark.criterion
REF = HarperParams(1.38, 18.63, 0.56)


@crit("1", "b(1.38, 0.56) = 9.315 and c2 = 18.63")
def test_c01_reference_b():
    t0 = time.perf_counter()
    b = b_value(1.38, 0.56)
    c2 = 2 * b
    elapsed = time.perf_counter() - t0
    assert abs(b - 9.315) <= 1e-3
    assert abs(c2 - 18.63) <= 2e-3
    assert elapsed < 1


@crit("2", "every grid point with c1 >= 20 has b >= 220")
def test_c02_large_c1_excluded():
    t0 = time.perf_counter()
    rep = grid_search()
    assert rep.min_b_c1_ge_20 is not None and rep.min_b_c1_ge_20 >= 220
    # the c1 < 100 side condition bounds the rest of the c1 >= 20 region
    c1 = axis((20.0 - 0.01, 100.0), 0.01, open_hi=True)
    c3 = axis((0.5, 1.0), 0.01, open_hi=True)
    g1, g3 = np.meshgrid(c1, c3, indexing="ij")
    assert c1[0] == 20.0
    assert np.all(b_value(g1, g3) >= 220)
    assert time.perf_counter() - t0 < 10


@crit("3", "V2 = 2.40e-3 satisfied, V1 violated, V3 vacuous at the reference point")
def test_c03_constraint_variants():
    v2 = constraint_value("V2", 1.38, 18.63, 0.56, 1)
    assert abs(v2.value - 2.40e-3) <= 1e-4 and v2.status == "satisfied"
    assert constraint_value("V1", 1.38, 18.63, 0.56, 1).status == "violated"
    v3 = constraint_value("V3", 1.38, 18.63, 0.56, 1)
    assert v3.a < 1 and v3.status == "vacuous"


@crit("4", "a1 = 1, a2 = 6/pi^2, f2 = 1/12, c2 = 1/(2 pi^2)")
def test_c04_ks_constants():
    t0 = time.perf_counter()
    assert abs(arithmetic_factor(1, 10**6) - 1) <= 1e-6
    assert abs(arithmetic_factor(2, 10**6) - 0.607927) <= 1e-4
    f2 = rmt_factor(2)
    assert f2.closed_form == Fraction(1, 12)
    assert abs(f2.extrapolated - 1 / 12) <= 0.01 / 12
    assert abs(moment_constant(2).c_k - 0.0506606) <= 1e-3
    assert time.perf_counter() - t0 < 60


@crit("5", "second-moment quadrature at T = 1e5 within 1% of the closed form")
def test_c05_second_moment():
    t0 = time.perf_counter()
    est = moment_quadrature(1, 1e5, 0.02)
    oracle = second_moment_mean(1e5)
    assert abs(est.value - oracle) <= 0.01 * oracle
    assert time.perf_counter() - t0 < 300


@crit("6a", "fourth-moment quadrature at T = 1e5 within [0.5, 2] of the leading term")
def test_c06a_fourth_moment_band():
    ratio = moment_quadrature(2, 1e5, 0.02).value / fourth_moment_leading(1e5)
    assert 0.5 <= ratio <= 2.0, f"ratio {ratio:.3f}"


@crit("6b", "fourth-moment log-log slope against log log T is 4 +- 0.8")
def test_c06b_fourth_moment_slope():
    Ts = np.array([1e4, 1e5, 2e5])
    vals = [moment_quadrature(2, float(T), 0.02).value for T in Ts]
    slope = np.polyfit(np.log(np.log(Ts)), np.log(vals), 1)[0]
    assert abs(slope - 4) <= 0.8, f"slope {slope:.3f}"


@crit("7", "cosine-product means: {2,2} -> 1/2, {2,3} -> 0, {2,2,3,3} -> 1/4")
def test_c07_cos_products():
    assert abs(cos_product_mean([2, 2], 1e4) - 0.5) <= 1e-3
    assert abs(cos_product_mean([2, 3], 1e4)) <= 1e-3
    assert abs(cos_product_mean([2, 2, 3, 3], 1e5) - float(f_of_n(36))) <= 1e-2
    assert f_of_n(36) == Fraction(1, 4)


@crit("8", "Mertens window (1e4, 1.38) within 0.01 of log 1.38")
def test_c08_mertens():
    m = mertens_window(1e4, 1.38)
    assert m.expected == pytest.approx(math.log(1.38))
    assert abs(m.deviation) <= 0.01


@crit("9a", "geometric sum <= 1 at (1.38, 18.63, 0.56), k = 1, L = 1e8")
def test_c09a_geometric_sum():
    g = geometric_sum_check(REF, 1, 1e8)
    assert g.passes, f"log sum {g.sum.log_value:.6g} at j = {g.worst_j}"


@crit("9b", "S(0) exponent check holds")
def test_c09b_s0_exponent():
    assert s0_exponent_check(REF, 1, 1e8)


@pytest.mark.parametrize("region", [2, 3, 4])
def test_c09c_regions(region, request):
    request.node.add_marker(pytest.mark.criterion(
        f"9c{region}", f"region {region}: log quadrature <= closed form, k in 1..3, L = 1e8"))
    t0 = time.perf_counter()
    bad = []
    for k in (1, 2, 3):
        r = region_integral(region, RegimeParams(k, 1e8), enforce_regime=False)
        if not r.holds:
            bad.append((k, r.quadrature.log_value, r.closed_form.log_value))
    assert time.perf_counter() - t0 < 60
    assert not bad, f"fails at (k, quad, closed) = {bad}"


@crit("9d", "d3 coefficient (1, 1, 1) = 916.19 +- 0.01")
def test_c09d_d3_coefficient():
    value = d3_coefficient(1, 1, 1)
    assert abs(value - 916.19) <= 0.01, f"got {value:.4f}"


@crit("10", "cap index 58 and beta_J <= c1 e^{-c2 k} on a 100-point grid")
def test_c10_cap_index():
    assert cap_index(REF, 1, 1e8) == 58
    n = 0
    for c1 in np.linspace(1.1, 3.0, 10):
        for c2 in np.linspace(2.0, 18.0, 10):
            p = HarperParams(float(c1), float(c2), 0.56)
            J = cap_index(p, 1, 1e8)
            assert beta(J, p, 1e8) <= c1 * math.exp(-c2) * (1 + 1e-12)
            n += 1
    assert n == 100


@crit("11", "partition cover and label consistency on 1e4 toy instances")
def test_c11_partition():
    rng = np.random.default_rng(2024)
    configs = [
        ([0.15, 0.3, 0.45, 0.6], 0.1, 1e4),
        ([0.15, 0.3, 0.45, 0.6], 0.3, 1e4),
        ([0.1, 0.2], 1.0, 1e4),
        ([0.1, 0.25, 0.4], 0.15, 2e4),
        ([0.3], 0.1, 1e4),
    ]
    total = 0
    seen = set()
    for betas, scale, T in configs:
        seq = BetaSequence.toy(betas, 0.56, [scale * b**-0.56 for b in betas])
        t = T + T * rng.random(2000)
        codes = classify_codes(seq, T, t)
        assert codes.shape == t.shape and np.all(codes >= -1) and np.all(codes < seq.J)
        for ti, c in zip(t.tolist(), codes.tolist()):
            label = TCAL if c < 0 else PartitionLabel(c)
            assert satisfies(label, ti, seq, T), (betas, scale, ti, c)
            seen.add(c)
            total += 1
    assert total == 10_000
    assert {-1, 0, 1, 2} <= seen


COMMAND_ARGS = {
    "optimize": ["--variant", "V2", "--step", "0.05"],
    "constants": ["--k", "2", "--prime-cutoff", "10000"],
    "moments": ["--k", "1", "--T", "1e5", "--n", "20000"],
    "large-values": ["--T", "1e4", "--n", "5000", "--V", "0", "1", "2"],
    "partition": ["--n", "500", "--threshold-scale", "0.1", "--betas", "0.15", "0.3", "0.45"],
    "verify-majorant": ["--T", "1e5", "--n", "3000"],
    "bounds": [],
    "d3": ["--chain"],
    "coscheck": ["--primes", "2", "2", "3", "3", "--T-int", "1e5"],
}


def _masked(path):
    doc = json.loads(path.read_text())
    doc.pop("timestamp")
    return json.dumps(doc, sort_keys=True)


@crit("12", "every command is byte-identical on rerun at any --jobs (timestamp masked)")
def test_c12_determinism(tmp_path, capsys):
    for cmd, extra in COMMAND_ARGS.items():
        runs = []
        for i, jobs in enumerate(("1", "1", "3")):
            out = tmp_path / f"{cmd}-{i}.json"
            code = main([cmd, *extra, "--seed", "7", "--jobs", jobs, "--output", str(out)])
            assert code == 0, cmd
            text = capsys.readouterr().out
            raw = out.read_text()
            runs.append((re.sub(r'"timestamp": "[^"]*"', "", raw),
                         re.sub(r"timestamp: .*", "", text), _masked(out)))
        assert runs[0] == runs[1] == runs[2], cmd


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
