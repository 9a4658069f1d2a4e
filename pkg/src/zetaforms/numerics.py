"""Exact and arbitrary-precision numerical primitives.

Rationals are :class:`fractions.Fraction`; reals and complexes are mpmath
``mpf``/``mpc`` values computed under an explicit working precision (bits).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpc, mpf

DEFAULT_PREC = 256
MIN_PREC = 64


class RootFindingError(RuntimeError):
    """Raised when a root cannot be bracketed, isolated or certified."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def check_prec(prec: int) -> int:
    if int(prec) < MIN_PREC:
        raise ValueError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    return int(prec)


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, float, decimal string or mpf."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, mpf):
        man, exp = x.man_exp
        man = int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def fraction_to_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def log2_abs(q: Fraction) -> float:
    """Approximate log2|q| for (possibly huge) nonzero rationals."""
    if q == 0:
        return -math.inf
    num, den = abs(q.numerator), q.denominator
    return (num.bit_length() - den.bit_length()) + math.log2(
        (num / 2 ** (num.bit_length() - 1)) / (den / 2 ** (den.bit_length() - 1))
    )


# --------------------------------------------------------------------------
# integer sequences


@lru_cache(maxsize=None)
def lcm_d(k: int) -> int:
    """d_k = lcm(1, ..., k)."""
    if k < 1:
        raise ValueError("lcm_d needs k >= 1")
    if k == 1:
        return 1
    return math.lcm(lcm_d(k - 1), k)


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> tuple[Fraction, ...]:
    table = [Fraction(1)]
    for j in range(1, m + 1):
        # sum_{i<=j} C(j+1, i) B_i = 0
        acc = sum(math.comb(j + 1, i) * table[i] for i in range(j))
        table.append(-acc / (j + 1))
    return tuple(table)


def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (convention B_1 = -1/2)."""
    if m < 0:
        raise ValueError("bernoulli needs m >= 0")
    # grow the cache in chunks so repeated calls stay linear
    size = max(16, 1 << (m.bit_length()))
    return _bernoulli_table(size)[m]


def zeta_int(s: int, prec: int = DEFAULT_PREC) -> mpf:
    """Riemann zeta at an integer s >= 2 by Euler-Maclaurin summation.

    For x^{-s} the Euler-Maclaurin remainder is bounded by the first omitted
    correction term, so the loop stops once that term is below 2^{-prec-16}.
    """
    s = int(s)
    if s <= 1:
        raise ValueError(f"zeta_int diverges at s={s}")
    check_prec(prec)
    return _zeta_int_cached(s, prec)


@lru_cache(maxsize=512)
def _zeta_int_cached(s: int, prec: int) -> mpf:
    wp = prec + 32
    with mp.workprec(wp):
        N = max(16, prec // 4)
        head = mpmath.fsum(mpf(k) ** (-s) for k in range(1, N))
        Nm = mpf(N)
        total = head + Nm ** (1 - s) / (s - 1) + Nm ** (-s) / 2
        cutoff = mpf(2) ** (-(prec + 16)) * total
        rising = mpf(s)  # s (s+1) ... (s+2k-2)
        power = Nm ** (-s - 1)
        k = 1
        while True:
            term = fraction_to_mpf(bernoulli(2 * k) / math.factorial(2 * k)) * rising * power
            total += term
            k += 1
            rising *= (s + 2 * k - 3) * (s + 2 * k - 2)
            power /= Nm * Nm
            nxt = fraction_to_mpf(bernoulli(2 * k) / math.factorial(2 * k)) * rising * power
            if abs(nxt) < cutoff:
                break
            if k > 4 * N:  # pragma: no cover - N is chosen so this never triggers
                raise RuntimeError("Euler-Maclaurin series for zeta did not converge")
    with mp.workprec(prec):
        return +total


# --------------------------------------------------------------------------
# dense polynomials


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial, coefficients from low to high degree.

    Coefficients are Fractions (exact) or mpmath numbers (inexact).
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Sequence, power: int = 1) -> "Poly":
        out = cls([Fraction(1)])
        for z in roots:
            out = out * cls([-z, 1])
        return out**power

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly([])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        out = Poly([Fraction(1)])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def compose_neg(self) -> "Poly":
        """p(-X)."""
        return Poly(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))

    def to_mp(self) -> list:
        out = []
        for c in self.coeffs:
            out.append(fraction_to_mpf(c) if isinstance(c, Fraction) else mpmath.mpmathify(c))
        return out

    def integer_coeffs(self) -> list[int]:
        """Rescale exact rational coefficients to a primitive integer list."""
        fr = [to_fraction(c) for c in self.coeffs]
        den = 1
        for c in fr:
            den = math.lcm(den, c.denominator)
        ints = [int(c * den) for c in fr]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        return [c // g for c in ints] if g > 1 else ints


def exact_sign(int_coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of an integer polynomial at a rational point, integers only."""
    u, v = x.numerator, x.denominator
    d = len(int_coeffs) - 1
    acc = 0
    upow = 1
    vpow = v**d
    for c in int_coeffs:
        acc += c * upow * vpow
        upow *= u
        vpow //= v
    return (acc > 0) - (acc < 0)


# --------------------------------------------------------------------------
# root finding


def _mp_horner(coeffs: Sequence, x):
    p = 0
    dp = 0
    for c in reversed(coeffs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def real_root_refine(p: Poly, bracket, prec: int = DEFAULT_PREC, samples: int = 64) -> mpf:
    """Refine the unique real root of ``p`` in ``bracket`` to ``prec`` bits.

    Sign tests are exact; the bracket is narrowed by bisection and the root
    then polished by Newton's method in multiprecision.
    """
    check_prec(prec)
    ints = p.integer_coeffs()
    lo, hi = to_fraction(bracket[0]), to_fraction(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    s_lo, s_hi = exact_sign(ints, lo), exact_sign(ints, hi)
    if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
        raise RootFindingError("no sign change on bracket", lo=str(lo), hi=str(hi), signs=(s_lo, s_hi))
    grid = [lo + (hi - lo) * Fraction(i, samples) for i in range(samples + 1)]
    signs = [exact_sign(ints, x) for x in grid]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0 or (b == 0 and a != 0))
    if changes > 1:
        raise RootFindingError("multiple sign changes in bracket", changes=changes)

    scale = max(Fraction(1), abs(lo), abs(hi))
    while hi - lo > scale / 2**48:
        mid = (lo + hi) / 2
        s_mid = exact_sign(ints, mid)
        if s_mid == 0:
            lo = hi = mid
            break
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid

    wp = prec + 64
    with mp.workprec(wp):
        cs = [mpf(c) for c in ints]
        lo_m, hi_m = fraction_to_mpf(lo), fraction_to_mpf(hi)
        x = (lo_m + hi_m) / 2
        tol = mpf(2) ** (-(prec + 16))
        for _ in range(200):
            fx, dfx = _mp_horner(cs, x)
            if fx == 0:
                break
            if dfx == 0:
                raise RootFindingError("zero derivative during Newton refinement")
            step = fx / dfx
            x_new = x - step
            if not (lo_m <= x_new <= hi_m):
                x_new = (lo_m + hi_m) / 2
            fnew = _mp_horner(cs, x_new)[0]
            if mpmath.sign(fnew) == s_lo:
                lo_m = max(lo_m, x_new)
            elif fnew != 0:
                hi_m = min(hi_m, x_new)
            x = x_new
            if abs(step) <= tol * abs(x):
                break
        else:
            raise RootFindingError("Newton refinement did not converge")
    with mp.workprec(prec):
        root = +x
    # exact certificate: sign change across a relative 2^{-prec+4} window
    xq = to_fraction(root)
    eps = Fraction(1, 2 ** (prec - 4))
    a_ = exact_sign(ints, xq - abs(xq) * eps)
    b_ = exact_sign(ints, xq + abs(xq) * eps)
    if a_ == b_ and a_ != 0:
        raise RootFindingError("root certificate failed", root=str(root))
    return root


def _aberth_double(coeffs: np.ndarray, maxiter: int = 2000, tol: float = 1e-15) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration on a monic double polynomial."""
    d = len(coeffs) - 1
    a = coeffs / coeffs[-1]
    # Fujiwara-type radius for the starting circle
    ratios = [abs(a[d - k]) ** (1.0 / k) for k in range(1, d + 1) if a[d - k] != 0]
    radius = 2.0 * max(ratios) if ratios else 1.0
    k = np.arange(d)
    z = radius * np.exp(2j * np.pi * (k + 0.25) / d) + 1e-3j
    dcoef = a[1:] * np.arange(1, d + 1)
    for it in range(maxiter):
        pz = np.polyval(a[::-1], z)
        dpz = np.polyval(dcoef[::-1], z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repel = (1.0 / diff).sum(axis=1)
            w = ratio / (1.0 - ratio * repel)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(np.abs(z), 1.0)):
            return z
    raise RootFindingError("Aberth iteration did not converge", iterations=maxiter, last_step=float(np.max(np.abs(w))))


def complex_roots(p: Poly, prec: int = DEFAULT_PREC, maxiter: int = 100) -> list[mpc]:
    """All complex roots of ``p``, sorted by (real part, imaginary part).

    Starting values come from a double-precision Aberth iteration; every root
    is then polished by Newton's method at ``prec`` bits. Each refined root must
    have a Newton correction below 2^{-prec+8}|z| and be separated from the
    others by more than its correction, otherwise RootFindingError is raised.
    """
    check_prec(prec)
    if p.degree < 1:
        raise ValueError("complex_roots needs a polynomial of degree >= 1")
    wp = prec + 32
    with mp.workprec(wp):
        cs = p.to_mp()
        lead = cs[-1]
        cs = [c / lead for c in cs]
        start = np.array([complex(c) for c in cs], dtype=np.complex128)
    try:
        z0 = _aberth_double(start)
    except RootFindingError:
        with mp.workprec(max(wp, 128)):
            z0 = np.array([complex(z) for z in mpmath.polyroots(cs[::-1], maxsteps=400, extraprec=wp)])
    roots, steps = [], []
    with mp.workprec(wp):
        tol = mpf(2) ** (-(prec + 8))
        for z in z0:
            x = mpc(z)
            step = mpf(1)
            for _ in range(maxiter):
                fx, dfx = _mp_horner(cs, x)
                if dfx == 0:
                    raise RootFindingError("vanishing derivative at a root (multiple root?)", root=str(x))
                dx = fx / dfx
                x -= dx
                step = abs(dx)
                if step <= tol * max(abs(x), mpf(1)):
                    break
            else:
                raise RootFindingError("Newton polish did not converge", root=str(x), step=str(step))
            roots.append(x)
            steps.append(step)
        certify = mpf(2) ** (-(prec - 8))
        for i, (x, st) in enumerate(zip(roots, steps)):
            if st > certify * max(abs(x), mpf(1)):
                raise RootFindingError("residual certificate failed", index=i, step=str(st))
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if abs(roots[i] - roots[j]) <= 4 * (steps[i] + steps[j]) + certify:
                    raise RootFindingError("roots not separated", i=i, j=j)
    with mp.workprec(prec):
        out = [+z for z in roots]
    out.sort(key=lambda z: (float(z.real), float(z.imag)))
    return out
