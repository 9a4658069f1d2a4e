from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from zetaforms.bounds import (
    TauVector,
    criterion_rank_bound,
    dim_lower_bound,
    evaluate,
    left_limit,
    log_alpha,
    log_Q_bound,
    plan_cor82,
    plan_th70,
    plan_th145,
    r_max,
    refined_rank_bound,
    tau_from_eps,
)

rs = st.fractions(min_value=1, max_value=12, max_denominator=9)
ab = st.sampled_from([(9, 1), (15, 1), (45, 5), (63, 7), (149, 1), (101, 3)])


def direct_alpha_Q(r: Fraction, a: int, b: int):
    """Plain products and powers, no logarithms."""
    ri = r.numerator // r.denominator
    rf = r - ri
    R, F = mpf(r.numerator) / r.denominator, mpf(rf.numerator) / rf.denominator
    alpha = mpmath.e ** (2 * (a + b - 1)) * mpf(2) ** (2 * b * (R + 1)) / R ** (2 * (a - 2 * b * R))
    Q = mpmath.e ** (2 * (a + b - 1)) * mpf(2) ** (2 * (a - 2 * b * ri)) * (2 * R + 1) ** (2 * b * (2 * R + 1))
    if rf:
        alpha /= F ** (4 * b * F)
        Q /= (2 * F) ** (4 * b * F)
    return alpha, Q


@given(rs, ab)
def test_log_space_matches_direct(r, pair):
    a, b = pair
    with mp.workprec(200):
        alpha, Q = direct_alpha_Q(r, a, b)
        assert abs(log_alpha(r, a, b, 200) - mpmath.log(alpha)) < mpf(10) ** -40
        assert abs(log_Q_bound(r, a, b, 200) - mpmath.log(Q)) < mpf(10) ** -40


@given(st.integers(2, 10), ab)
def test_left_limits_match_integer_values(m, pair):
    a, b = pair
    la, lq = left_limit(m, a, b, 128)
    with mp.workprec(128):
        assert abs(la - log_alpha(m, a, b, 128)) < mpf(10) ** -30
        assert abs(lq - log_Q_bound(m, a, b, 128)) < mpf(10) ** -30


def test_r_below_one_rejected():
    with pytest.raises(ValueError):
        log_alpha(Fraction(1, 2), 9, 1)


@given(ab)
def test_r_max_solves_interval_equation(pair):
    a, b = pair
    top = r_max(a, b, 128)
    if a < 9 * b:
        assert top is None
        return
    with mp.workprec(128):
        val = mpf(9) / 2 * b * top * mpmath.log(4 * top + 3)
        assert abs(val - a) < mpf(10) ** -25 * a


def test_r_max_depends_on_ratio():
    with mp.workprec(128):
        assert abs(r_max(9, 1, 128) - r_max(63, 7, 128)) < mpf(10) ** -30
    assert r_max(7, 1) is None


def test_dim_bound_9_1():
    at_one = evaluate(1, 9, 1, 128).dim_bound
    assert mpf("0.35") < at_one < mpf("0.45")
    # direct formula at r = 1: (b+1)/2 * (1 - log alpha / log Q)
    with mp.workprec(128):
        alpha, Q = direct_alpha_Q(Fraction(1), 9, 1)
        assert abs(at_one - (1 - mpmath.log(alpha) / mpmath.log(Q))) < mpf(10) ** -30
    best = dim_lower_bound(9, 1, 64, 128)
    assert best.dim_bound >= at_one
    finer = dim_lower_bound(9, 1, 128, 128)
    assert abs(finer.dim_bound - best.dim_bound) <= mpf(10) ** -6 * best.dim_bound


def test_tau_vector_decreasing():
    with pytest.raises(ValueError):
        TauVector([mpf(1), mpf(1)])
    tau = TauVector([mpf("0.5"), mpf("0.25"), mpf("0.1")])
    assert criterion_rank_bound(3, tau) == 3 + mpmath.fsum(tau.tau)
    assert refined_rank_bound(1, tau) == 1 + mpf("0.1")
    with pytest.raises(ValueError):
        refined_rank_bound(4, tau)


def test_tau_from_eps_requires_increasing_eps():
    with pytest.raises(ValueError):
        tau_from_eps({1: mpf(2), 3: mpf(1)}, 2, 45, 5)
    tau = tau_from_eps({1: mpf("1e-49"), 3: mpf("2e-49"), 5: mpf("3e-49")}, 2, 45, 5)
    assert tau.k == 3


def test_cor82_margin():
    rep = plan_cor82(Fraction(1, 20))
    assert rep.passed and rep.margin > mpf("0.4")
    with pytest.raises(ValueError):
        plan_cor82(Fraction(1, 10))


@pytest.mark.parametrize("D", [1, 3])
def test_th145_small_D(D):
    rep = plan_th145(D, 128)
    assert rep.passed and rep.margin > 0


def test_th145_constants():
    rep = plan_th145(1, 256)
    with mp.workprec(256):
        assert abs(rep.params["log_alpha"] - mpf("-607.44564090229288661")) < mpf(10) ** -15
        assert abs(rep.params["log_Q"] - mpf("601.22318322365212580")) < mpf(10) ** -15


def test_th70_small_eps_reaches_positive_best_margin():
    rep = plan_th70(Fraction(1, 100), 100**1200, 1, 128)
    assert rep.params["best_r_margin"] > 0
