import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

from zetaforms.acceptance import trig_identity_error
from zetaforms.cotangent import (
    _expand_laurent,
    build_basis,
    chebyshev_t,
    cot_derivative_poly,
    expand_symmetric,
    w_poly,
)

odd_b = st.integers(0, 8).map(lambda i: 2 * i + 1)


def test_b3_matrix_exact():
    basis = build_basis(3)
    assert basis.E == (1, 3)
    assert basis.c == ((Fraction(1, 8), Fraction(1, 2)), (Fraction(-1, 8), Fraction(0)))


@pytest.mark.parametrize("b", [1, 3, 5, 7, 9, 11])
def test_identity_against_hurwitz_zeta(b):
    assert trig_identity_error(b, 40, random.Random(b)) < mpf("1e-25")


@given(odd_b)
def test_inverse_and_column_structure(b):
    basis = build_basis(b)
    k = basis.k
    for i in range(k):
        for j in range(k):
            assert sum(basis.c[i][l] * basis.d[l][j] for l in range(k)) == (i == j)
    assert basis.c_entry(b, 1) != 0
    assert all(basis.c_entry(b, beta) == 0 for beta in basis.E if beta >= 3)


@given(odd_b, st.data())
def test_two_expansions_agree(b, data):
    beta = data.draw(st.sampled_from(range(1, b + 1, 2)))
    w = w_poly(b, beta)
    assert expand_symmetric(w, b) == _expand_laurent(w, b)


@given(st.integers(0, 12), st.floats(0, 3.1))
def test_chebyshev_cosine(n, theta):
    with mp.workprec(100):
        t = chebyshev_t(n).to_mp()
        val = mpmath.polyval(list(reversed(t)), mpmath.cos(theta))
        assert abs(val - mpmath.cos(n * mpf(theta))) < mpf(2) ** -80


@pytest.mark.parametrize("m", [0, 1, 2, 4])
def test_cot_derivatives_numerically(m):
    with mp.workprec(120):
        z = mpf("0.7")
        p = cot_derivative_poly(m).to_mp()
        val = mpmath.polyval(list(reversed(p)), mpmath.cot(z))
        assert abs(val - mpmath.diff(mpmath.cot, z, m)) < mpf(10) ** -25


def test_even_b_rejected():
    with pytest.raises(ValueError):
        build_basis(4)
