import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from zetaforms.numerics import (
    Poly,
    bernoulli,
    check_prec,
    complex_roots,
    exact_sign,
    lcm_d,
    real_root_refine,
    to_fraction,
    zeta_int,
)

small_q = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(small_q, min_size=1, max_size=6).map(Poly)


@pytest.mark.parametrize("k", [1, 2, 10, 37, 100])
def test_lcm_d_matches_reduce(k):
    assert lcm_d(k) == math.lcm(*range(1, k + 1))


@pytest.mark.parametrize("m", [0, 1, 2, 4, 12, 30])
def test_bernoulli_against_mpmath(m):
    got = bernoulli(m)
    with mp.workprec(200):
        want = mpmath.bernoulli(m)
        assert abs(mpf(got.numerator) / got.denominator - want) < mpf(2) ** -180


@pytest.mark.parametrize("s", [2, 3, 5, 7, 11])
def test_zeta_against_mpmath(s):
    with mp.workprec(300):
        assert abs(zeta_int(s, 256) - mpmath.zeta(s)) < mpf(2) ** -250


def test_precision_floor():
    with pytest.raises(ValueError):
        check_prec(32)
    assert check_prec(64) == 64


@given(polys, polys, small_q)
def test_poly_ring_laws(p, q, x):
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(polys, small_q)
def test_poly_derivative_product_rule(p, x):
    q = Poly([Fraction(1), Fraction(2), Fraction(-1)])
    assert (p * q).derivative()(x) == (p.derivative() * q + p * q.derivative())(x)
    assert p.compose_neg()(x) == p(-x)


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5))
def test_from_roots_vanishes(roots):
    p = Poly.from_roots([Fraction(r) for r in roots])
    assert p.degree == len(roots)
    assert all(p(Fraction(r)) == 0 for r in roots)


@given(polys, small_q)
def test_exact_sign_agrees(p, x):
    ints = (p * Fraction(math.lcm(*(Fraction(c).denominator for c in p.coeffs)))).integer_coeffs()
    val = Poly([Fraction(c) for c in ints])(x)
    assert exact_sign(ints, x) == (val > 0) - (val < 0)


def test_real_root_sqrt2():
    p = Poly([Fraction(-2), Fraction(0), Fraction(1)])
    with mp.workprec(256):
        root = real_root_refine(p, (Fraction(1), Fraction(2)), 256)
        assert abs(root - mpmath.sqrt(2)) < mpf(2) ** -250


def test_complex_roots_of_cyclotomic():
    p = Poly([Fraction(1), 0, 0, 0, 0, Fraction(1)])  # x^5 + 1
    roots = complex_roots(p, 192)
    with mp.workprec(192):
        want = [mpmath.expj(mpmath.pi * (2 * j + 1) / 5) for j in range(5)]
        for w in want:
            assert min(abs(w - z) for z in roots) < mpf(2) ** -180


def test_to_fraction_is_exact():
    assert to_fraction("3/2") == Fraction(3, 2)
    assert to_fraction(0.1) == Fraction(0.1)
    with mp.workprec(100):
        x = mpf(1) / 3
        assert mpf(to_fraction(x).numerator) / to_fraction(x).denominator == x
