"""Exact linear forms in odd zeta values from a well-poised hypergeometric series.

For parameters (a, b, r, n) the summand

    R(t) = ((t-(2r+1)n)_{2rn} (t+n+1)_{2rn})^b / ((t-n)_{2n+1})^a

is split into partial fractions sum c[j, m] (t-m)^{-j} over the poles
m = -n..n. Summing its (beta-1)-th derivative over t > n, normalised by
F / (beta-1)!, gives

    I_beta = ltilde_beta + sum_{odd i} ell_i binom(beta+i-2, beta-1) zeta(beta+i-1)

with ell_i = F sum_m c[i, m] shared by every beta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from .cotangent import CotangentBasis, odd_indices
from .numerics import (
    DEFAULT_PREC,
    Poly,
    bernoulli,
    check_prec,
    fraction_to_mpf,
    lcm_d,
    log2_abs,
    zeta_int,
)


class FormStructureError(ArithmeticError):
    """An exact identity that the construction guarantees has failed."""


@dataclass(frozen=True)
class FormParams:
    a: int
    b: int
    r: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        if self.a < 3 or self.a % 2 == 0:
            raise ValueError(f"a must be odd and >= 3, got {self.a}")
        if self.b < 1 or self.b % 2 == 0:
            raise ValueError(f"b must be odd and >= 1, got {self.b}")
        if self.r < 0:
            raise ValueError("r must be non-negative")
        if self.n < 1:
            raise ValueError("n must be positive")
        if 2 * self.b * self.r >= self.a:
            raise ValueError(f"need 2br < a, got 2*{self.b}*{self.r} >= {self.a}")
        if (self.r * self.n).denominator != 1:
            raise ValueError(f"r*n must be an integer (r={self.r}, n={self.n})")

    @property
    def r_int(self) -> int:
        return math.floor(self.r)

    @property
    def r_frac(self) -> Fraction:
        return self.r - self.r_int

    @property
    def rn(self) -> int:
        return int(self.r * self.n)

    @property
    def E(self) -> list[int]:
        return odd_indices(self.b)

    @property
    def poles(self) -> range:
        return range(-self.n, self.n + 1)

    def numerator_roots(self) -> list[int]:
        """Roots of the numerator, each of multiplicity b."""
        n, two_rn = self.n, 2 * self.rn
        top = two_rn + n  # (2r+1)n
        right = [top - i for i in range(two_rn)]
        left = [-n - 1 - i for i in range(two_rn)]
        return sorted(left + right)

    def factors(self) -> list[tuple[int, int]]:
        """(root, exponent) pairs with R(t) = prod (t - root)^exponent."""
        out = [(rho, self.b) for rho in self.numerator_roots()]
        out += [(m, -self.a) for m in self.poles]
        return out

    def normalisation(self) -> Fraction:
        """F = (2n)!^{a-2b[r]} / (2{r}n)!^{2b}."""
        n = self.n
        frac_n = int(2 * self.r_frac * n)
        return Fraction(
            math.factorial(2 * n) ** (self.a - 2 * self.b * self.r_int),
            math.factorial(frac_n) ** (2 * self.b),
        )

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "r": str(self.r), "n": self.n}


def _pochhammer_poly(shift: int, length: int) -> Poly:
    """(t + shift)_length as an exact polynomial in t."""
    return Poly.from_roots([Fraction(-shift - i) for i in range(length)])


def build_summand(params: FormParams) -> tuple[Poly, Poly]:
    n, rn2 = params.n, 2 * params.rn
    shift = -(rn2 + n)
    num = (_pochhammer_poly(shift, rn2) * _pochhammer_poly(n + 1, rn2)) ** params.b
    den = _pochhammer_poly(-n, 2 * n + 1) ** params.a
    if num.degree >= den.degree - 1:
        raise ValueError("numerator degree too large: series would diverge")
    return num, den


@dataclass(frozen=True)
class PartialFractions:
    params: FormParams
    # c[m][j-1] is the coefficient of (t-m)^{-j}
    c: dict[int, tuple[Fraction, ...]]

    def coeff(self, j: int, m: int) -> Fraction:
        return self.c[m][j - 1]

    def column_sum(self, j: int) -> Fraction:
        return sum((self.c[m][j - 1] for m in self.params.poles), Fraction(0))

    def evaluate(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        total = Fraction(0)
        for m in self.params.poles:
            inv = 1 / (t - m)
            p = inv
            for cj in self.c[m]:
                total += cj * p
                p *= inv
        return total


def _pole_expansion(factors: list[tuple[int, int]], m: int, order: int) -> list[Fraction]:
    """Taylor coefficients h_0..h_order of prod_{root != m} (t-root)^e around t = m."""
    cs = [(m - rho, e) for rho, e in factors if rho != m]
    const = Fraction(1)
    for c, e in cs:
        const *= Fraction(c) ** e
    # power sums P_k = sum e / c^k with one integer common denominator
    L = 1
    for c, _ in cs:
        L = math.lcm(L, abs(c))
    quot = [(L // c, e) for c, e in cs]  # exact, sign carried by c
    s = [Fraction(0)] * (order + 1)
    powers = [q for q, _ in quot]
    Lk = 1
    for k in range(1, order + 1):
        Lk *= L
        num = sum(e * pw for pw, (_, e) in zip(powers, quot))
        # log(c + eps) = log c + sum (-1)^{k+1} eps^k / (k c^k)
        s[k] = Fraction((-1) ** (k + 1) * num, k * Lk)
        powers = [pw * q for pw, (q, _) in zip(powers, quot)]
    h = [Fraction(1)] + [Fraction(0)] * order
    for k in range(1, order + 1):
        h[k] = sum(i * s[i] * h[k - i] for i in range(1, k + 1)) / k
    return [const * x for x in h]


@lru_cache(maxsize=64)
def partial_fractions(params: FormParams) -> PartialFractions:
    a = params.a
    factors = params.factors()
    c = {}
    for m in params.poles:
        h = _pole_expansion(factors, m, a - 1)
        # R = h(eps) / eps^a, so c[j, m] = h_{a-j}
        c[m] = tuple(h[a - j] for j in range(1, a + 1))
    return PartialFractions(params, c)


@lru_cache(maxsize=None)
def _harmonic_table(K: int, s: int) -> tuple[Fraction, ...]:
    """H^{(s)}_k = sum_{u<=k} u^{-s} for k = 0..K."""
    out = [Fraction(0)]
    for u in range(1, K + 1):
        out.append(out[-1] + Fraction(1, u**s))
    return tuple(out)


@dataclass(frozen=True)
class LinearFormFamily:
    params: FormParams
    ltilde: dict[int, Fraction]
    ell: dict[int, Fraction]
    F: Fraction
    meta: dict = field(default_factory=dict, compare=False)

    def coefficients(self) -> list[Fraction]:
        return list(self.ltilde.values()) + list(self.ell.values())

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(x) for x in self.coefficients()), default=Fraction(0))

    def common_denominator(self) -> int:
        p = self.params
        return lcm_d(2 * p.n) ** (p.a + p.b - 1)

    def denominators_ok(self) -> bool:
        D = self.common_denominator()
        return all((D * x).denominator == 1 for x in self.coefficients())

    def zeta_terms(self, beta: int) -> list[tuple[Fraction, int]]:
        """(coefficient, s) pairs so that I_beta = ltilde + sum coeff * zeta(s)."""
        return [
            (self.ell[i] * math.comb(beta + i - 2, beta - 1), beta + i - 1)
            for i in sorted(self.ell)
        ]

    def to_json(self) -> dict:
        from .report import rational_json

        return {
            "params": self.params.to_json(),
            "F": rational_json(self.F),
            "ltilde": {str(k): rational_json(v) for k, v in sorted(self.ltilde.items())},
            "ell": {str(k): rational_json(v) for k, v in sorted(self.ell.items())},
            "common_denominator_exponent": self.params.a + self.params.b - 1,
        }


def check_cancellations(pf: PartialFractions) -> None:
    p = pf.params
    s1 = pf.column_sum(1)
    if s1 != 0:
        raise FormStructureError(f"sum_m c[1,m] = {s1} != 0")
    for j in range(2, p.a + 1, 2):
        sj = pf.column_sum(j)
        if sj != 0:
            raise FormStructureError(f"sum_m c[{j},m] = {sj} != 0 (even-zeta term survives)")


def extract_linear_form(params: FormParams) -> LinearFormFamily:
    pf = partial_fractions(params)
    check_cancellations(pf)
    n, a = params.n, params.a
    F = params.normalisation()
    ell = {i: F * pf.column_sum(i) for i in range(3, a + 1, 2)}
    ltilde = {}
    for beta in params.E:
        acc = Fraction(0)
        for j in range(1, a + 1):
            binom = math.comb(j + beta - 2, beta - 1)
            H = _harmonic_table(2 * n, j + beta - 1)
            for m in params.poles:
                cjm = pf.c[m][j - 1]
                if cjm:
                    acc += cjm * binom * H[n - m]
        ltilde[beta] = -F * acc
    return LinearFormFamily(params, ltilde, ell, F)


def _coefficient_bits(form: LinearFormFamily) -> int:
    return max((int(log2_abs(x)) + 1 for x in form.coefficients() if x), default=0)


def _form_sum(form: LinearFormFamily, beta: int, wp: int) -> mpf:
    with mp.workprec(wp):
        total = fraction_to_mpf(form.ltilde[beta])
        for coeff, s in form.zeta_terms(beta):
            if coeff:
                total += fraction_to_mpf(coeff) * zeta_int(s, wp)
        return total


def eval_form(form: LinearFormFamily, beta: int, prec: int = DEFAULT_PREC) -> mpf:
    """ltilde_beta + sum ell_i binom(beta+i-2, beta-1) zeta(beta+i-1), to prec bits.

    The zeta combination cancels heavily: a first pass sized by the largest
    coefficient finds the magnitude of the result, and a second pass is run if
    that magnitude shows more bits were lost, repeating until stable.
    """
    check_prec(prec)
    if beta not in form.ltilde:
        raise ValueError(f"beta={beta} not in E")
    big = _coefficient_bits(form)
    wp = prec + max(big, 0) + 64
    total = _form_sum(form, beta, wp)
    # a noisy first pass overstates |total|, so repeat until the loss fits
    while total:
        lost = big - int(mpmath.log(abs(total), 2))
        if lost <= wp - prec - 32:
            break
        wp = prec + lost + 64
        total = _form_sum(form, beta, wp)
    with mp.workprec(prec):
        return +total


# --------------------------------------------------------------------------
# direct summation


def taylor_at(factors: list[tuple[int, int]], t: int, order: int) -> list:
    """Taylor coefficients of prod (t + eps - root)^e in eps, up to eps^order.

    Evaluated in the current mpmath precision; no partial fractions involved.
    """
    zero_power = sum(e for rho, e in factors if rho == t)
    if zero_power < 0:
        raise ValueError("expansion point is a pole")
    if zero_power > order:
        return [mpf(0)] * (order + 1)
    L = order - zero_power
    rest = [(mpf(t - rho), e) for rho, e in factors if rho != t]
    log_abs = mpmath.fsum(e * mpmath.log(abs(c)) for c, e in rest)
    negative = sum(e for c, e in rest if c < 0) % 2
    scale = mpmath.exp(log_abs) * (-1 if negative else 1)
    h = [mpf(1)] + [mpf(0)] * L
    if L:
        s = [mpf(0)] * (L + 1)
        invs = [(1 / c, e) for c, e in rest]
        pw = [inv for inv, _ in invs]
        for k in range(1, L + 1):
            Pk = mpmath.fsum(e * x for x, (_, e) in zip(pw, invs))
            s[k] = Pk / k if k % 2 else -Pk / k
            pw = [x * inv for x, (inv, _) in zip(pw, invs)]
        for k in range(1, L + 1):
            h[k] = mpmath.fsum(i * s[i] * h[k - i] for i in range(1, k + 1)) / k
    return [mpf(0)] * zero_power + [scale * x for x in h]


@dataclass
class SeriesResult:
    value: mpf
    tail_bound: mpf
    cutoff: int
    em_terms: int
    prec: int


def _integral_tail_beta1(pf: PartialFractions, T: int, wp: int, guard_bits: int) -> mpf:
    """int_T^oo R(t) dt from the partial fractions.

    The algebraic part is summed exactly; the logarithmic part
    -sum_m c[1,m] log(1 - m/T) cancels, so it is evaluated at wp + guard_bits.
    """
    exact = Fraction(0)
    for m in pf.params.poles:
        base = Fraction(1, T - m)
        pw = base
        for j in range(2, pf.params.a + 1):
            exact += pf.c[m][j - 1] * pw / (j - 1)
            pw *= base
    with mp.workprec(wp + guard_bits):
        logs = mpmath.fsum(
            fraction_to_mpf(pf.c[m][0]) * mpmath.log1p(mpf(-m) / T) for m in pf.params.poles
        )
        val = fraction_to_mpf(exact) - logs
    return val


def series_with_bound(
    params: FormParams,
    beta: int,
    prec: int = DEFAULT_PREC,
    cutoff: int | None = None,
    em_terms: int | None = None,
) -> SeriesResult:
    """I_beta by direct summation of the series, with an Euler-Maclaurin tail.

    Terms t < cutoff come from Taylor coefficients of the product form of R;
    the tail uses Euler-Maclaurin with derivatives again from the product form
    and, for beta = 1, the tail integral from the partial fractions.
    ``tail_bound`` is twice the first omitted correction term. With
    ``em_terms`` fixed, the bound decreases as the cutoff grows.
    """
    check_prec(prec)
    if beta not in params.E:
        raise ValueError(f"beta={beta} not in E={params.E}")
    wp = prec + 32
    top = (2 * params.rn + params.n)  # largest numerator root
    if cutoff is None:
        cutoff = top + 1 + 32 + wp // 2
    if cutoff <= top:
        raise ValueError("cutoff must exceed every root of the summand")
    factors = params.factors()
    F = params.normalisation()
    deriv = beta - 1
    with mp.workprec(wp):
        head = mpmath.fsum(
            taylor_at(factors, t, deriv)[deriv] for t in range(top + 1, cutoff)
        )
        # f(T + eps) = sum_q f^{(q)}(T)/q! eps^q, where f = R^{(beta-1)}/(beta-1)!
        caps = (em_terms,) if em_terms is not None else (wp // 4, wp // 2, wp, 2 * wp, 4 * wp)
        for kcap in caps:
            order = 2 * kcap + 1 + deriv
            series_R = taylor_at(factors, cutoff, order)
            f_coef = [math.comb(q + deriv, deriv) * series_R[q + deriv] for q in range(order - deriv + 1)]
            f0 = f_coef[0]
            terms = []
            for k in range(1, kcap + 2):
                q = 2 * k - 1
                b2k = fraction_to_mpf(bernoulli(2 * k) / math.factorial(2 * k))
                terms.append(b2k * f_coef[q] * math.factorial(q))
            if em_terms is not None:
                used = em_terms
                break
            target = mpf(2) ** (-wp) * (abs(head) + abs(f0))
            used = next((i for i, tm in enumerate(terms) if abs(tm) < target), None)
            if used is not None:
                break
        else:
            raise RuntimeError("Euler-Maclaurin tail did not converge; raise the cutoff")
        corr = -mpmath.fsum(terms[:used])
        omitted = abs(terms[used])
        if deriv == 0:
            pf = partial_fractions(params)
            big = max((log2_abs(pf.c[m][0]) for m in params.poles if pf.c[m][0]), default=0.0)
            guard = max(0, int(big - mpmath.log(abs(f0), 2))) + 64
            integral = _integral_tail_beta1(pf, cutoff, wp, guard)
        else:
            # int_T^oo R^{(beta-1)}/(beta-1)! = -R^{(beta-2)}(T)/(beta-1)!
            integral = -series_R[deriv - 1] / deriv
        total = head + integral + f0 / 2 + corr
        value = fraction_to_mpf(F) * total
        bound = 2 * fraction_to_mpf(F) * omitted
    with mp.workprec(prec):
        return SeriesResult(+value, +bound, cutoff, used, prec)


def eval_series(params: FormParams, beta: int, prec: int = DEFAULT_PREC) -> mpf:
    return series_with_bound(params, beta, prec).value


def assemble_S(forms: dict[int, LinearFormFamily], basis: CotangentBasis, lam: int, prec: int = DEFAULT_PREC) -> mpf:
    """S_lambda = sum_beta d[beta, lambda] pi^{-beta} I_beta."""
    if not forms:
        raise ValueError("no forms given")
    params = {f.params for f in forms.values()}
    if len(params) != 1:
        raise ValueError("forms must share parameters")
    p = params.pop()
    if basis.b != p.b:
        raise ValueError(f"basis b={basis.b} does not match forms b={p.b}")
    if lam not in basis.E:
        raise ValueError(f"lambda={lam} not in E={basis.E}")
    if set(forms) != set(basis.E):
        raise ValueError("need one form per beta in E")
    wp = prec + 32
    with mp.workprec(wp):
        total = mpf(0)
        for beta in basis.E:
            total += fraction_to_mpf(basis.d_entry(beta, lam)) * mpmath.pi ** (-beta) * eval_form(forms[beta], beta, wp)
    with mp.workprec(prec):
        return +total


def coefficient_growth_bound(a: int, b: int, r) -> mpf:
    """2^{2(a-2b[r])} (2r+1)^{2b(2r+1)} / (2{r})^{4b{r}} (the n-th root bound)."""
    r = Fraction(r)
    ri = math.floor(r)
    rf = r - ri
    val = mpf(2) ** (2 * (a - 2 * b * ri)) * fraction_to_mpf(2 * r + 1) ** fraction_to_mpf(2 * b * (2 * r + 1))
    if rf:
        val /= fraction_to_mpf(2 * rf) ** fraction_to_mpf(4 * b * rf)
    return val


@dataclass
class GrowthRow:
    n: int
    coef_root: mpf
    form_root: mpf
    log_rate: mpf  # (1/n) log of the factorial-normalised |I_{1,n}|
    bound: mpf
    within_bound: bool


def growth_diagnostics(a: int, b: int, r, n_values, prec: int = 128) -> list[GrowthRow]:
    """n-th roots of coefficient size and |I_{1,n}|; n with rn not integral are skipped."""
    r = Fraction(r)
    rows = []
    with mp.workprec(prec + 32):
        bound = coefficient_growth_bound(a, b, r)
    slack = mpmath.exp(mpf(1) / 2)
    for n in n_values:
        if (r * n).denominator != 1:
            continue
        params = FormParams(a, b, r, n)
        form = extract_linear_form(params)
        I1 = eval_series(params, 1, prec)
        with mp.workprec(prec + 32):
            big = form.max_abs_coefficient()
            coef_root = mpmath.exp(mpf(log2_abs(big)) * mpmath.log(2) / n)
            rf = params.r_frac
            # (2{r}n)!^{2b} / (2n)!^{2b{r}} removes the fractional-part growth
            log_norm = 2 * b * mpmath.loggamma(2 * rf * n + 1) - 2 * b * fraction_to_mpf(rf) * mpmath.loggamma(2 * n + 1)
            log_rate = (mpmath.log(abs(I1)) + log_norm) / n
            form_root = mpmath.exp(mpmath.log(abs(I1)) / n)
        rows.append(GrowthRow(n, coef_root, form_root, log_rate, bound, bool(coef_root <= bound * slack)))
    return rows
