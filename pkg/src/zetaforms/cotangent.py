"""Cotangent-derivative polynomials and the invertible matrix c^(b).

For odd b and beta in E = {1, 3, ..., b} we build V_beta with
sin^beta(z) cot_beta(z) = V_beta(cos z), the padded W_{b,beta}, and the
rational matrix c with sin^b(z) cot_beta(z) = sum_lambda c[lambda, beta]
(e^{i lambda z} + e^{-i lambda z}), together with its exact inverse d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .numerics import Poly

ONE = Fraction(1)
X = Poly([Fraction(0), ONE])


def odd_indices(b: int) -> list[int]:
    return list(range(1, b + 1, 2))


def _check_odd(value: int, name: str) -> None:
    if value < 1 or value % 2 == 0:
        raise ValueError(f"{name} must be an odd positive integer, got {value}")


@lru_cache(maxsize=None)
def cot_derivative_poly(m: int) -> Poly:
    """P_m with d^m/dz^m cot z = P_m(cot z); P_{m+1} = -(1 + X^2) P_m'."""
    if m == 0:
        return X
    prev = cot_derivative_poly(m - 1)
    return -(prev.derivative() * Poly([ONE, 0, ONE]))


@lru_cache(maxsize=None)
def cot_poly(beta: int) -> Poly:
    """V_beta: sin^beta(z) cot_beta(z) = V_beta(cos z)."""
    _check_odd(beta, "beta")
    p = cot_derivative_poly(beta - 1)
    scale = Fraction((-1) ** (beta - 1), math.factorial(beta - 1))
    one_minus_x2 = Poly([ONE, 0, -ONE])
    out = Poly([])
    # cot^j sin^beta = cos^j sin^(beta-j); only odd j occur, so beta-j is even
    for j, c in enumerate(p.coeffs):
        if c == 0:
            continue
        assert (beta - j) % 2 == 0
        out = out + (X**j) * (one_minus_x2 ** ((beta - j) // 2)) * c
    return out * scale


def w_poly(b: int, beta: int) -> Poly:
    """W_{b,beta} = (1 - X^2)^{(b-beta)/2} V_beta."""
    _check_odd(b, "b")
    _check_odd(beta, "beta")
    if beta > b:
        raise ValueError("beta must not exceed b")
    return Poly([ONE, 0, -ONE]) ** ((b - beta) // 2) * cot_poly(beta)


@lru_cache(maxsize=None)
def chebyshev_t(n: int) -> Poly:
    if n == 0:
        return Poly([ONE])
    if n == 1:
        return X
    return X * chebyshev_t(n - 1) * 2 - chebyshev_t(n - 2)


def expand_symmetric(w: Poly, b: int) -> dict[int, Fraction]:
    """Coefficients c_lambda with W((Y + 1/Y)/2) = sum c_lambda (Y^lambda + Y^-lambda).

    Since Y^l + Y^-l = 2 T_l(X), these are the odd Chebyshev coefficients halved.
    """
    _check_odd(b, "b")
    if w.degree > b:
        raise ValueError(f"degree {w.degree} exceeds b={b}")
    if any(c != 0 for i, c in enumerate(w.coeffs) if i % 2 == 0):
        raise ValueError("polynomial has a nonzero even part")
    rest = w
    cheb: dict[int, Fraction] = {}
    for deg in range(b, 0, -2):
        lead = rest.coeffs[deg] if deg < len(rest.coeffs) else Fraction(0)
        t = chebyshev_t(deg)
        coef = Fraction(lead) / t.lead
        cheb[deg] = coef
        if coef:
            rest = rest - t * coef
    assert rest.is_zero()
    return {lam: cheb[lam] / 2 for lam in odd_indices(b)}


def _expand_laurent(w: Poly, b: int) -> dict[int, Fraction]:
    """Same as expand_symmetric, by direct substitution X = (Y + 1/Y)/2."""
    # Laurent polynomial as dict exponent -> coefficient
    acc: dict[int, Fraction] = {}
    for j, c in enumerate(w.coeffs):
        if c == 0:
            continue
        for i in range(j + 1):
            e = 2 * i - j
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c) * math.comb(j, i) / 2**j
    out = {}
    for lam in odd_indices(b):
        assert acc.get(lam, 0) == acc.get(-lam, 0)
        out[lam] = acc.get(lam, Fraction(0))
    return out


def solve_exact(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class CotangentBasis:
    """c and d are indexed [row][col] with rows/cols in the order of ``E``."""

    b: int
    E: tuple[int, ...]
    V: dict[int, Poly] = field(repr=False)
    W: dict[int, Poly] = field(repr=False)
    c: tuple[tuple[Fraction, ...], ...]
    d: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.E)

    def c_entry(self, lam: int, beta: int) -> Fraction:
        return self.c[self.E.index(lam)][self.E.index(beta)]

    def d_entry(self, beta: int, lam: int) -> Fraction:
        return self.d[self.E.index(beta)][self.E.index(lam)]

    def to_json(self) -> dict:
        from .report import rational_json

        return {
            "b": self.b,
            "E": list(self.E),
            "V": {str(beta): [rational_json(x) for x in self.V[beta].coeffs] for beta in self.E},
            "c": [[rational_json(x) for x in row] for row in self.c],
            "d": [[rational_json(x) for x in row] for row in self.d],
        }


@lru_cache(maxsize=None)
def build_basis(b: int, debug: bool | None = None) -> CotangentBasis:
    _check_odd(b, "b")
    E = tuple(odd_indices(b))
    V = {beta: cot_poly(beta) for beta in E}
    W = {beta: w_poly(b, beta) for beta in E}
    cols = {beta: expand_symmetric(W[beta], b) for beta in E}
    if debug if debug is not None else b <= 9:
        for beta in E:
            assert cols[beta] == _expand_laurent(W[beta], b), (b, beta)
    c = [[cols[beta][lam] for beta in E] for lam in E]
    try:
        d = solve_exact(c)
    except ArithmeticError as exc:
        raise ArithmeticError(f"cotangent matrix for b={b} is singular") from exc
    return CotangentBasis(
        b=b,
        E=E,
        V=V,
        W=W,
        c=tuple(tuple(row) for row in c),
        d=tuple(tuple(row) for row in d),
    )
