from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from zetaforms.saddle import (
    CutError,
    SaddleParams,
    arg_g,
    asymptotics,
    branch_walk,
    build_G,
    build_Q,
    check_hypotheses,
    eval_f,
    eval_fp,
    eval_fpp,
    eval_g,
    locate_mu1,
    locate_rho,
    psi,
)

P45 = SaddleParams(45, 5, 2)


def test_mu1_depends_on_ratio_only():
    with mp.workprec(256):
        m1 = locate_mu1(SaddleParams(149, 1, 11), 256)
        m3 = locate_mu1(SaddleParams(447, 3, 11), 256)
        assert abs(m1 - m3) < mpf(2) ** -240
        assert 23 < m1 < 24


def test_mu1_root_of_the_quoted_polynomial():
    # (X+23)(X-1)^150 - (X-23)(X+1)^150 at r = 11, b = 1, a = 149
    with mp.workprec(256):
        m = locate_mu1(SaddleParams(149, 1, 11), 256)
        val = (m + 23) * (m - 1) ** 150 - (m - 23) * (m + 1) ** 150
        scale = (m + 23) * (m - 1) ** 150
        assert abs(val / scale) < mpf(2) ** -200


@given(st.sampled_from([(3, 1, Fraction(1)), (9, 1, Fraction(2)), (45, 5, Fraction(2)), (15, 3, Fraction(1, 2))]))
def test_Q_is_even(abr):
    Q = build_Q(SaddleParams(*abr))
    assert all(c == 0 for c in Q.coeffs[1::2])
    assert Q.compose_neg().coeffs == Q.coeffs


def test_Q_small_case():
    assert list(build_Q(SaddleParams(3, 1, 1)).coeffs) == [6, 0, 28, 0, -2]


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_G_factors_Q(x, y):
    z = mpc(x, y)
    with mp.workprec(160):
        prod = mpc(1)
        for lam in (-3, -1, 1, 3, 5):
            prod *= build_G(P45, lam)(z)
        q = build_Q(P45).to_mp()
        want = mpmath.polyval(list(reversed(q)), z)
        assert abs(prod - want) <= mpf(2) ** -120 * max(abs(want), 1)


@pytest.mark.parametrize("lam", [1, 3])
def test_fp_at_saddle(lam):
    with mp.workprec(256):
        rho = locate_rho(P45, lam, 256)
        assert abs(eval_fp(rho, P45, 256) - mpc(0, lam) * mpmath.pi) < mpf(10) ** -60
        assert rho.real > 0


def test_fp_is_derivative_of_f():
    z = mpc("3.1", "0.4")
    h = mpf(10) ** -15
    with mp.workprec(256):
        num = (eval_f(z + h, P45, 256) - eval_f(z - h, P45, 256)) / (2 * h)
        assert abs(num - eval_fp(z, P45, 256)) < mpf(10) ** -20
        num2 = (eval_fp(z + h, P45, 256) - eval_fp(z - h, P45, 256)) / (2 * h)
        assert abs(num2 - eval_fpp(z, P45, 256)) < mpf(10) ** -20


def test_upper_bank_is_limit_from_above():
    with mp.workprec(128):
        tau = mpf("5.3")
        h = mpf(10) ** -30
        near = eval_f(mpc(tau, h), P45, 128)
        assert abs(near - eval_f(tau, P45, 128, upper=True)) < mpf(10) ** -25
        assert abs(eval_g(mpc(tau, h), P45, 128) - eval_g(tau, P45, 128, upper=True)) < mpf(10) ** -25


@given(st.floats(1.2, 4.8), st.floats(-2, 2))
def test_principal_logs_are_continuous_on_cut_plane(x, y):
    if abs(y) < 1e-3:
        y = 0.5
    assert branch_walk(mpc(x, y), P45, steps=200, prec=64) < mpf(10) ** -10


def test_arg_g_real_on_interval():
    assert arg_g(mpf(3), P45, 128) == 0


def test_cut_rejected():
    with pytest.raises(CutError):
        eval_f(mpf(6), P45)
    with pytest.raises(CutError):
        eval_f(mpf(0), P45)


def test_hypotheses_report_distinguishes_conditions():
    rep = check_hypotheses(SaddleParams(149, 1, 11), 128)
    assert rep.ratio_ok and rep.mu1_ok
    assert not rep.interval_ok


def test_structure_45_5_2():
    data = asymptotics(P45, 256)
    with mp.workprec(256):
        assert 0 < data.eps[1] < data.eps[3] < data.eps[5]
        assert mpmath.re(data.rho[1]) < mpmath.re(data.rho[3]) < data.mu1
        assert data.exceptional_candidates == []


def test_psi_limit():
    for lam in (1, 3):
        val = psi(P45, lam, Fraction(1, 1000), 128)
        with mp.workprec(128):
            assert abs(val + mpmath.expj(-lam * mpmath.pi / 5)) < mpf(10) ** -2
    with pytest.raises(ValueError):
        psi(P45, 5)


def test_invalid_params():
    with pytest.raises(ValueError):
        SaddleParams(9, 1, 4)
    with pytest.raises(ValueError):
        SaddleParams(9, 1, 0)
