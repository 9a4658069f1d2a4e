from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from mpmath import mp, mpf

from zetaforms.cotangent import build_basis
from zetaforms.hyperforms import (
    FormParams,
    assemble_S,
    build_summand,
    eval_form,
    eval_series,
    extract_linear_form,
    growth_diagnostics,
    partial_fractions,
    series_with_bound,
)
from zetaforms.numerics import lcm_d


@st.composite
def form_params(draw):
    b = draw(st.sampled_from([1, 3]))
    r = draw(st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]))
    low = int(2 * b * r) + 1
    a = draw(st.sampled_from([x for x in range(3, 16, 2) if x > low - 1 and 2 * b * r < x]))
    n = draw(st.integers(1, 4))
    assume((r * n).denominator == 1)
    return FormParams(a, b, r, n)


def _mp(q):
    return mpf(q.numerator) / q.denominator


def test_smallest_form_exact():
    form = extract_linear_form(FormParams(3, 1, 1, 1))
    assert form.ltilde == {1: Fraction(577, 8)}
    assert form.ell == {3: Fraction(-60)}


def test_smallest_form_against_nsum():
    params = FormParams(3, 1, 1, 1)
    num, den = build_summand(params)
    with mp.workprec(160):
        oracle = 2 * mpmath.nsum(lambda t: _mp(num(Fraction(int(t)))) / _mp(den(Fraction(int(t)))), [2, mpmath.inf])
        assert abs(eval_series(params, 1, 160) - oracle) < mpf(10) ** -40
        assert abs(eval_form(extract_linear_form(params), 1, 160) - oracle) < mpf(10) ** -40
        assert abs(oracle - mpf("0.0015858104243428760157")) < mpf(10) ** -21


def test_beta3_against_differentiated_nsum():
    params = FormParams(9, 3, 1, 1)
    num, den = build_summand(params)
    F = params.normalisation()
    with mp.workprec(128):
        pn = [_mp(c) for c in reversed(num.coeffs)]
        pd = [_mp(c) for c in reversed(den.coeffs)]
        summand = lambda t: mpmath.diff(lambda x: mpmath.polyval(pn, x) / mpmath.polyval(pd, x), t, 2)
        oracle = _mp(F) / 2 * mpmath.nsum(summand, [2, mpmath.inf])
        assert abs(eval_series(params, 3, 128) - oracle) < abs(oracle) * mpf(10) ** -30


@pytest.mark.parametrize(
    "args",
    [(4, 1, 1, 1), (3, 2, 1, 1), (3, 3, 1, 1), (3, 1, -1, 1), (3, 1, Fraction(1, 2), 1), (3, 1, 1, 0)],
)
def test_invalid_params(args):
    with pytest.raises(ValueError):
        FormParams(*args)


@given(form_params(), st.fractions(min_value=-20, max_value=20, max_denominator=5))
def test_partial_fractions_reproduce_summand(params, t):
    assume(t.denominator != 1 or abs(t) > params.n)
    num, den = build_summand(params)
    assert partial_fractions(params).evaluate(t) == num(t) / den(t)


@given(form_params())
def test_cancellations_and_denominators(params):
    pf = partial_fractions(params)
    assert pf.column_sum(1) == 0
    assert all(pf.column_sum(i) == 0 for i in range(2, params.a + 1, 2))
    form = extract_linear_form(params)
    scale = lcm_d(2 * params.n) ** (params.a + params.b - 1)
    assert all((c * scale).denominator == 1 for c in form.coefficients())
    assert form.denominators_ok()


@given(form_params())
def test_ell_shared_by_every_beta(params):
    form = extract_linear_form(params)
    for beta in params.E:
        for coeff, s in form.zeta_terms(beta):
            assert s % 2 == 1 and s >= 3


@pytest.mark.parametrize("params", [FormParams(9, 1, 1, 3), FormParams(15, 3, Fraction(3, 2), 2), FormParams(5, 1, 0, 4)])
def test_two_routes_agree(params):
    form = extract_linear_form(params)
    with mp.workprec(192):
        for beta in params.E:
            assert abs(eval_form(form, beta, 192) - eval_series(params, beta, 192)) < mpf(10) ** -40


def test_tail_bound_decreases_with_cutoff():
    params = FormParams(9, 1, 1, 2)
    bounds = [series_with_bound(params, 1, 128, cutoff=c, em_terms=8).tail_bound for c in (80, 120, 200)]
    assert bounds[0] > bounds[1] > bounds[2]


def test_assemble_requires_all_betas():
    basis = build_basis(3)
    form = extract_linear_form(FormParams(9, 3, 1, 1))
    with pytest.raises((ValueError, KeyError)):
        assemble_S({1: form}, basis, 1, 128)


def test_assemble_matches_definition():
    params = FormParams(9, 3, 1, 1)
    form = extract_linear_form(params)
    basis = build_basis(3)
    with mp.workprec(160):
        for lam in (1, 3):
            want = sum(_mp(basis.d_entry(beta, lam)) * mpmath.pi ** (-beta) * eval_series(params, beta, 160) for beta in (1, 3))
            assert abs(assemble_S({1: form, 3: form}, basis, lam, 160) - want) < mpf(10) ** -40


def test_growth_rows_within_bound():
    rows = growth_diagnostics(9, 1, 1, (2, 4, 6), 96)
    assert [r.n for r in rows] == [2, 4, 6]
    assert all(r.within_bound for r in rows)
