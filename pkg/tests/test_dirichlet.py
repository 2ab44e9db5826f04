import cmath
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetabound.dirichlet import (Factorization, OutOfRegimeWarning, SmoothedPolyConfig,
                                 cos_product_mean, f_of_n, g_sum, majorant_rhs)
from zetabound.errors import PreconditionError, RegimeError

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def direct_majorant(t: float, x: float, T: float, N: float = 0.0) -> float:
    lx = math.log(x)
    ps = [p for p in range(2, int(x) + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]
    s = sum(p ** -(0.5 + 1 / lx) * cmath.exp(-1j * t * math.log(p)) * math.log(x / p) / lx for p in ps)
    cut = min(math.sqrt(x), math.log(T))
    s += sum(0.5 * cmath.exp(-(1 + 2j * t) * math.log(p)) for p in ps if p <= cut)
    return s.real + math.log(T) / lx + N


def test_g_sum_four_term_oracle():
    cfg = SmoothedPolyConfig(1e4, 0.0, 0.25, 0.5)
    assert cfg.primes().tolist() == [2, 3, 5, 7]
    l100 = 2 * math.log(10)
    oracle = sum(p ** (-0.5 - 1 / l100) * (1 - math.log(p) / l100) for p in (2, 3, 5, 7))
    assert g_sum(cfg, 0.0) == pytest.approx(oracle, rel=1e-14)


def test_g_sum_empty_window():
    cfg = SmoothedPolyConfig(1e4, 0.26, 0.27, 0.5)  # (10.96, 12.02] holds 11 only
    assert cfg.primes().tolist() == [11]
    empty = SmoothedPolyConfig(1e4, 0.2615, 0.2620, 0.5)  # (11.1, 11.2]
    assert g_sum(empty, 3.0) == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1e6))
def test_g_sum_triangle_bound(t):
    cfg = SmoothedPolyConfig(1e6, 0.1, 0.4, 0.5)
    bound = float(np.sum(cfg.primes().astype(float) ** -0.5))
    assert abs(g_sum(cfg, t)) <= bound


def test_g_sum_vectorised_matches_scalar():
    cfg = SmoothedPolyConfig(1e5, 0.0, 0.3, 0.3)
    ts = np.array([0.0, 12.5, 1e4, 7.77e4])
    vec = g_sum(cfg, ts)
    for t, v in zip(ts, vec):
        assert g_sum(cfg, float(t)) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_config_validation():
    with pytest.raises(PreconditionError):
        SmoothedPolyConfig(100, 0, 0.1, 0.2)
    with pytest.raises(PreconditionError):
        SmoothedPolyConfig(1e4, 0.3, 0.2, 0.5)
    with pytest.raises(PreconditionError):
        SmoothedPolyConfig(1e4, 0.1, 0.6, 0.5)
    with pytest.raises(PreconditionError):
        SmoothedPolyConfig(1e6, 0.1, 0.2, 2.0)  # T^2 = 1e12 > capacity


def test_majorant_x_t_squared():
    T, t = 30.0, 45.0
    x = T * T
    assert math.log(T) / math.log(x) == 0.5
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfRegimeWarning)
        v = majorant_rhs(t, x, T)
    assert v == pytest.approx(direct_majorant(t, x, T), abs=1e-12)
    # the constant part is 1/2: shift by N and compare the two prime sums alone
    lx = math.log(x)
    sums = direct_majorant(t, x, T, N=0.0) - 0.5
    assert v - 0.5 == pytest.approx(sums, abs=1e-12)
    assert lx == pytest.approx(2 * math.log(T))


def test_majorant_regression_against_direct_sum():
    v = majorant_rhs(1.5e6, 1e3, 1e6, 0.0)
    assert v == pytest.approx(direct_majorant(1.5e6, 1e3, 1e6), abs=1e-10)
    assert majorant_rhs(1.5e6, 1e3, 1e6, 2.5) == pytest.approx(v + 2.5, abs=1e-12)


def test_majorant_finite_at_zero():
    with pytest.warns(OutOfRegimeWarning):
        v = majorant_rhs(14.134725, 100.0, 1e3)
    assert math.isfinite(v)


def test_majorant_bad_x():
    with pytest.raises(PreconditionError):
        majorant_rhs(2e4, 1.5, 1e4)
    with pytest.raises(PreconditionError):
        majorant_rhs(2e4, 1e9, 1e4)
    with pytest.raises(PreconditionError):
        majorant_rhs(5.0, 100.0, 1e4)


def test_majorant_gap_statistics():
    from zetabound.moments import stratified_points
    from zetabound.zeta import log_abs_zeta

    T = 1e6
    t = stratified_points(T, 10_000, 0)
    gap = majorant_rhs(t, T**0.25, T) - log_abs_zeta(t)
    assert np.percentile(gap, 1) > -5


def test_f_examples():
    assert f_of_n(1) == 1
    assert f_of_n(Factorization()) == 1
    assert f_of_n(4) == Fraction(1, 2)
    assert f_of_n(12) == 0
    assert f_of_n(16) == Fraction(3, 8)
    assert f_of_n(36) == Fraction(1, 4)
    assert f_of_n(Factorization.from_primes([2, 2, 3, 3])) == Fraction(1, 4)


def test_factorization():
    assert Factorization.of(360).factors == ((2, 3), (3, 2), (5, 1))
    assert Factorization.of(360).value == 360
    with pytest.raises(PreconditionError):
        Factorization(((4, 1),))
    with pytest.raises(PreconditionError):
        Factorization(((3, 1), (2, 1)))


def test_f_multiplicative_on_squares():
    squares = [n * n for n in range(1, 101)]
    for m in squares:
        for n in squares:
            if math.gcd(m, n) == 1:
                assert f_of_n(m * n) == f_of_n(m) * f_of_n(n)


def test_f_bounds():
    for n in range(1, 3000):
        assert 0 <= f_of_n(n) <= 1
    for p in SMALL_PRIMES:
        assert f_of_n(p * p) == Fraction(1, 2)


def test_cos_mean_examples():
    T = 1e4
    closed = 0.5 + math.sin(2 * T * math.log(2)) / (4 * math.log(2) * T)
    assert cos_product_mean([2, 2], T) == pytest.approx(closed, abs=1e-12)
    assert abs(cos_product_mean([2, 2], T) - 0.5) < 1e-3
    assert abs(cos_product_mean([2, 3], T)) < 1e-3
    assert abs(cos_product_mean([2, 2, 3, 3], 1e5) - 0.25) < 1e-2


def test_cos_mean_methods_agree():
    for ps, T in (([2, 2], 1e4), ([2, 3], 1e4), ([2, 2, 3, 3], 1e5), ([3, 5, 5], 1e5)):
        assert cos_product_mean(ps, T, "quadrature") == pytest.approx(
            cos_product_mean(ps, T, "exact"), abs=1e-4)


def test_cos_mean_errors():
    with pytest.raises(RegimeError):
        cos_product_mean([37, 41], 1e4)
    with pytest.raises(PreconditionError):
        cos_product_mean([4], 1e4)
    with pytest.raises(PreconditionError):
        cos_product_mean([2], 2e7)
    assert cos_product_mean([], 10.0) == 1.0


def test_cos_mean_converges_to_f():
    rng = np.random.default_rng(7)
    limit = 1e4**0.4
    done = 0
    while done < 20:
        size = int(rng.integers(1, 6))
        ps = sorted(int(p) for p in rng.choice(SMALL_PRIMES[:5], size=size))
        if math.prod(ps) > limit:
            continue
        f = float(f_of_n(math.prod(ps)))
        near = abs(cos_product_mean(ps, 1e4) - f)
        far = abs(cos_product_mean(ps, 1e6) - f)
        assert far < near + 1e-3
        done += 1
