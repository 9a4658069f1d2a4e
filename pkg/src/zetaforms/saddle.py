"""Saddle-point data for the forms with parameters (a, b, r).

Works on the plane cut along (-inf, 1] and [2r+1, +inf). All logarithms are
principal, which makes them continuous on the cut plane and real on the
interval (1, 2r+1). A point tau > 2r+1 on the upper bank of the right cut
is requested with ``upper=True``; there log(2r+1-tau) is replaced by
log(tau-2r-1) - i*pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpc, mpf

from .cotangent import odd_indices
from .numerics import (
    DEFAULT_PREC,
    Poly,
    RootFindingError,
    check_prec,
    complex_roots,
    fraction_to_mpf,
    real_root_refine,
    to_fraction,
)


class CutError(ValueError):
    """Evaluation requested on a branch cut without the upper-bank flag."""


@dataclass(frozen=True)
class SaddleParams:
    a: int
    b: int
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", to_fraction(self.r))
        if self.a < 3 or self.a % 2 == 0:
            raise ValueError(f"a must be odd and >= 3, got {self.a}")
        if self.b < 1 or self.b % 2 == 0:
            raise ValueError(f"b must be odd and >= 1, got {self.b}")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if 3 * self.b * self.r > self.a:
            raise ValueError(f"need 3br <= a (a={self.a}, b={self.b}, r={self.r})")

    @property
    def E(self) -> list[int]:
        return odd_indices(self.b)

    @property
    def c(self) -> Fraction:
        """Right end 2r+1 of the real interval where f is real."""
        return 2 * self.r + 1

    def with_r(self, r) -> "SaddleParams":
        return SaddleParams(self.a, self.b, r)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "r": str(self.r)}


# --------------------------------------------------------------------------
# polynomials


def build_Q(params: SaddleParams) -> Poly:
    """(X+2r+1)^b (X-1)^{a+b} - (X-2r-1)^b (X+1)^{a+b}, exact."""
    a, b, c = params.a, params.b, params.c
    one = Fraction(1)
    left = Poly([c, one]) ** b * Poly([-one, one]) ** (a + b)
    right = Poly([-c, one]) ** b * Poly([one, one]) ** (a + b)
    return left - right


def _check_lambda(params: SaddleParams, lam: int) -> None:
    if lam % 2 == 0 or not (-params.b < lam <= params.b):
        raise ValueError(f"lambda must be odd with -b < lambda <= b, got {lam}")


def build_G(params: SaddleParams, lam: int) -> Poly:
    """(X+2r+1)(X-1)^{a/b+1} - e^{i lam pi/b}(2r+1-X)(X+1)^{a/b+1}, mp coefficients."""
    a, b, c = params.a, params.b, params.c
    if a % b:
        raise ValueError(f"b={b} does not divide a={a}")
    _check_lambda(params, lam)
    e = a // b + 1
    one = Fraction(1)
    left = Poly([c, one]) * Poly([-one, one]) ** e
    right = Poly([c, -one]) * Poly([one, one]) ** e
    rot = mpmath.expjpi(mpf(lam) / b)
    if lam == b:
        rot = mpf(-1)  # keep the real factor exactly real
    n = max(len(left.coeffs), len(right.coeffs))
    lc = left.to_mp() + [mpf(0)] * (n - len(left.coeffs))
    rc = right.to_mp() + [mpf(0)] * (n - len(right.coeffs))
    return Poly([x - rot * y for x, y in zip(lc, rc)])


def _mu1_bracket(params: SaddleParams) -> tuple[Fraction, Fraction]:
    c = params.c
    return c, c + params.b * params.r / (params.a + params.b)


def locate_mu1(params: SaddleParams, prec: int = DEFAULT_PREC) -> mpf:
    """The unique root of Q in (2r+1, oo).

    Q(2r+1) > 0, and the root lies below 2r+1 + br/(a+b) under the usual
    hypotheses; if Q has not changed sign there the bracket is widened
    geometrically.
    """
    check_prec(prec)
    Q = build_Q(params)
    ints = Q.integer_coeffs()
    from .numerics import exact_sign

    lo, hi = _mu1_bracket(params)
    if exact_sign(ints, lo) <= 0:
        raise RootFindingError("Q(2r+1) is not positive", r=str(params.r))
    width = hi - lo
    for _ in range(64):
        if exact_sign(ints, hi) < 0:
            break
        width *= 2
        hi = lo + width
    else:
        raise RootFindingError("could not bracket mu1", r=str(params.r))
    return real_root_refine(Q, (lo, hi), prec)


def locate_rho(params: SaddleParams, lam: int, prec: int = DEFAULT_PREC) -> mpc:
    """The unique root of G_{r,lam} with positive real part (lam in E, lam != b)."""
    check_prec(prec)
    if lam == params.b:
        raise ValueError("rho_b is mu1 + i0; use locate_mu1")
    if lam not in params.E:
        raise ValueError(f"lambda={lam} not in E={params.E}")
    wp = prec + 32
    with mp.workprec(wp):
        G = build_G(params, lam)
    roots = complex_roots(G, wp)
    # G has roots on the imaginary axis; their computed real parts are noise
    with mp.workprec(wp):
        noise = mpf(2) ** (-(prec // 2))
        right = [z for z in roots if z.real > noise * max(abs(z), 1)]
    if len(right) != 1:
        raise RootFindingError(
            "expected exactly one root with positive real part",
            lam=lam,
            candidates=[str(z) for z in right],
        )
    rho = right[0]
    with mp.workprec(wp):
        residual = abs(G(rho))
        dG = abs(G.derivative()(rho))
        if residual > mpf(2) ** (-prec + 8) * dG * max(abs(rho), 1):
            raise RootFindingError("residual certificate failed for rho", lam=lam, residual=str(residual))
    with mp.workprec(prec):
        return +rho


# --------------------------------------------------------------------------
# f, f0, f'', g on the cut plane


def _logs(tau, params: SaddleParams, upper: bool):
    """log(tau+2r+1), log(2r+1-tau), log(tau-1), log(tau+1) on the right branch."""
    c = fraction_to_mpf(params.c)
    tau = mpmath.mpmathify(tau)
    if upper:
        if isinstance(tau, mpc) and tau.imag != 0:
            raise ValueError("upper-bank evaluation needs a real tau")
        tau = mpf(tau.real) if isinstance(tau, mpc) else tau
        if not tau > c:
            raise ValueError("upper-bank evaluation needs tau > 2r+1")
        l_mid = mpmath.log(tau - c) - mpc(0, 1) * mpmath.pi
    else:
        im = tau.imag if isinstance(tau, mpc) else 0
        re = tau.real if isinstance(tau, mpc) else tau
        if im == 0 and (re <= 1 or re >= c):
            raise CutError(f"tau={tau} lies on a branch cut; pass upper=True for tau+i0")
        l_mid = mpmath.log(c - tau)
    return mpmath.log(tau + c), l_mid, mpmath.log(tau - 1), mpmath.log(tau + 1), tau


def eval_f(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    with mp.workprec(prec + 32):
        l_plus, l_mid, l_m1, l_p1, tau = _logs(tau, params, upper)
        a, b, c = params.a, params.b, fraction_to_mpf(params.c)
        val = (
            b * (tau + c) * l_plus
            + b * (c - tau) * l_mid
            + (a + b) * (tau - 1) * l_m1
            - (a + b) * (tau + 1) * l_p1
            + 2 * fraction_to_mpf(a - 2 * b * params.r) * mpmath.log(2)
        )
    with mp.workprec(prec):
        return +val


def eval_fp(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    with mp.workprec(prec + 32):
        l_plus, l_mid, l_m1, l_p1, _ = _logs(tau, params, upper)
        a, b = params.a, params.b
        val = b * l_plus - b * l_mid + (a + b) * l_m1 - (a + b) * l_p1
    with mp.workprec(prec):
        return +val


def eval_f0(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    with mp.workprec(prec + 32):
        f = eval_f(tau, params, prec + 32, upper)
        fp = eval_fp(tau, params, prec + 32, upper)
        val = f - mpmath.mpmathify(tau) * fp
    with mp.workprec(prec):
        return +val


def eval_fpp(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    with mp.workprec(prec + 32):
        _, _, _, _, tau = _logs(tau, params, upper)  # validates the position
        a, b, c = params.a, params.b, fraction_to_mpf(params.c)
        val = b / (tau + c) + b / (c - tau) + (a + b) / (tau - 1) - (a + b) / (tau + 1)
    with mp.workprec(prec):
        return +val


def log_g(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    """log g with the imaginary part left unwrapped (sum of the factor arguments)."""
    with mp.workprec(prec + 32):
        l_plus, l_mid, l_m1, l_p1, _ = _logs(tau, params, upper)
        a, b = params.a, params.b
        val = mpf(b) / 2 * (l_plus + l_mid) - mpf(a + b) / 2 * (l_p1 + l_m1)
    with mp.workprec(prec):
        return +val


def eval_g(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False):
    with mp.workprec(prec + 32):
        val = mpmath.exp(log_g(tau, params, prec + 32, upper))
    with mp.workprec(prec):
        return +val


def arg_g(tau, params: SaddleParams, prec: int = DEFAULT_PREC, upper: bool = False) -> mpf:
    return mpmath.im(log_g(tau, params, prec, upper))


def branch_walk(tau, params: SaddleParams, steps: int = 256, prec: int = 64, upper: bool = False) -> mpf:
    """Largest gap between continued and principal logarithms along a path.

    Walks the segment from the midpoint of (1, 2r+1) to tau (to tau + i*h for
    upper-bank points), continuing each logarithm by its small increments, and
    compares with the principal values used by the evaluators.
    """
    with mp.workprec(prec):
        c = fraction_to_mpf(params.c)
        start = (1 + c) / 2
        target = mpmath.mpmathify(tau)
        if upper:
            target = mpc(target.real, mpf(2) ** (-prec // 2))
        args = [lambda z: z + c, lambda z: c - z, lambda z: z - 1, lambda z: z + 1]
        cont = [mpmath.log(h(mpf(start))) for h in args]
        prev = [h(mpf(start)) for h in args]
        for k in range(1, steps + 1):
            z = start + (target - start) * mpf(k) / steps
            for i, h in enumerate(args):
                cur = h(z)
                cont[i] += mpmath.log(cur / prev[i])
                prev[i] = cur
        l_plus, l_mid, l_m1, l_p1, _ = _logs(tau, params, upper)
        principal = [l_plus, l_mid, l_m1, l_p1]
        gap = max(abs(x - y) for x, y in zip(cont, principal))
        if upper:
            # the walk stops just above the cut, which moves log(2r+1-tau) by ~h
            gap = max(gap - mpf(2) ** (-prec // 2 + 8), mpf(0))
        return gap


# --------------------------------------------------------------------------
# asymptotic data


@dataclass
class HypothesisReport:
    params: SaddleParams
    ratio_ok: bool  # (3+1/r)^b < (1+1/(2r))^{a+b}
    ratio_margin: mpf
    mu1_ok: bool  # mu1 <= 2r+1+min(...)
    mu1_margin: mpf
    interval_ok: bool  # r >= 1 and (9/2) b r log(4r+3) <= a
    interval_margin: mpf
    mu1: mpf

    @property
    def saddle_ok(self) -> bool:
        """The conditions the asymptotic estimate itself needs."""
        return self.ratio_ok and self.mu1_ok

    def to_json(self, prec: int) -> dict:
        from .report import real_json

        return {
            "ratio_condition": {"holds": self.ratio_ok, "margin": real_json(self.ratio_margin, prec)},
            "mu1_condition": {"holds": self.mu1_ok, "margin": real_json(self.mu1_margin, prec)},
            "interval_condition": {"holds": self.interval_ok, "margin": real_json(self.interval_margin, prec)},
            "saddle_hypotheses_hold": self.saddle_ok,
        }


def check_hypotheses(params: SaddleParams, prec: int = DEFAULT_PREC) -> HypothesisReport:
    a, b, r = params.a, params.b, params.r
    mu1 = locate_mu1(params, prec)
    with mp.workprec(prec + 32):
        rm = fraction_to_mpf(r)
        ratio_margin = (a + b) * mpmath.log(1 + 1 / (2 * rm)) - b * mpmath.log(3 + 1 / rm)
        bound = min(b * rm * (rm + 1) / (2 * (a + b)), rm * (rm + 1) / (3 * (2 * rm + 1)))
        mu1_margin = 2 * rm + 1 + bound - mu1
        interval_margin = a - mpf(9) / 2 * b * rm * mpmath.log(4 * rm + 3)
    return HypothesisReport(
        params,
        bool(ratio_margin > 0),
        ratio_margin,
        bool(mu1_margin >= 0),
        mu1_margin,
        bool(r >= 1 and interval_margin >= 0),
        interval_margin,
        mu1,
    )


def _dist_to_half_pi(phi) -> mpf:
    """Distance from phi to pi/2 + pi*Z."""
    x = mpmath.fmod(phi - mpmath.pi / 2, mpmath.pi)
    if x < 0:
        x += mpmath.pi
    return min(x, mpmath.pi - x)


def dist_mod_pi(phi) -> mpf:
    """Distance from phi to pi*Z."""
    x = mpmath.fmod(phi, mpmath.pi)
    if x < 0:
        x += mpmath.pi
    return min(x, mpmath.pi - x)


@dataclass
class SaddleData:
    params: SaddleParams
    prec: int
    mu1: mpf
    rho: dict[int, mpc]
    eps: dict[int, mpf]
    omega: dict[int, mpf]
    phi: dict[int, mpf]
    fpp: dict[int, mpc]
    g_at_rho: dict[int, mpc]
    fp_residual: dict[int, mpf]
    hypotheses: HypothesisReport
    exceptional_candidates: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        from .report import real_json

        p = self.prec
        per = {}
        for lam in self.params.E:
            per[str(lam)] = {
                "rho": real_json(self.rho[lam], p),
                "upper_bank": lam == self.params.b,
                "eps": real_json(self.eps[lam], p),
                "omega": real_json(self.omega[lam], p),
                "phi": real_json(self.phi[lam], p),
                "fpp": real_json(self.fpp[lam], p),
                "g": real_json(self.g_at_rho[lam], p),
                "fp_residual": real_json(self.fp_residual[lam], 64),
            }
        return {
            "params": self.params.to_json(),
            "mu1": real_json(self.mu1, p),
            "roots": per,
            "hypotheses": self.hypotheses.to_json(p),
            "exceptional_r_candidates": self.exceptional_candidates,
        }


PHI_TOLERANCE = mpf("1e-8")


def asymptotics(params: SaddleParams, prec: int = DEFAULT_PREC, require: bool = True) -> SaddleData:
    """eps, omega, phi at every saddle point rho_lambda, lambda in E.

    With ``require`` the hypotheses of the asymptotic estimate must hold,
    otherwise ValueError is raised.
    """
    check_prec(prec)
    hyp = check_hypotheses(params, prec)
    if require and not hyp.saddle_ok:
        raise ValueError(
            f"saddle hypotheses fail for {params}: ratio={hyp.ratio_ok}, mu1={hyp.mu1_ok}"
        )
    b = params.b
    rho, eps, omega, phi, fpp, gval, resid = {}, {}, {}, {}, {}, {}, {}
    for lam in params.E:
        upper = lam == b
        z = hyp.mu1 if upper else locate_rho(params, lam, prec)
        with mp.workprec(prec):
            f0 = eval_f0(z, params, prec, upper)
            f2 = eval_fpp(z, params, prec, upper)
            lg = log_g(z, params, prec, upper)
            fp = eval_fp(z, params, prec, upper)
            rho[lam] = mpc(z)
            eps[lam] = mpmath.exp(mpmath.re(f0))
            omega[lam] = mpmath.im(f0)
            fpp[lam] = mpc(f2)
            gval[lam] = mpmath.exp(lg)
            phi[lam] = -mpmath.arg(f2) / 2 + mpmath.im(lg)
            resid[lam] = abs(fp - mpc(0, lam) * mpmath.pi)
    candidates = [lam for lam in params.E if _dist_to_half_pi(phi[lam]) <= PHI_TOLERANCE]
    return SaddleData(params, prec, hyp.mu1, rho, eps, omega, phi, fpp, gval, resid, hyp, candidates)


def psi(params: SaddleParams, lam: int, r=None, prec: int = DEFAULT_PREC) -> mpc:
    """Psi_lambda(r) = (g^2/|g|^2)(|f''|/f'') at rho_lambda."""
    if r is not None:
        r = to_fraction(r)
        if not (0 < r < Fraction(params.a, 3 * params.b)):
            raise ValueError(f"r must lie in (0, a/(3b)), got {r}")
        params = params.with_r(r)
    if lam == params.b:
        raise ValueError("Psi is defined for lambda in E without b")
    z = locate_rho(params, lam, prec)
    with mp.workprec(prec + 32):
        lg = log_g(z, params, prec + 32)
        f2 = eval_fpp(z, params, prec + 32)
        unit_g2 = mpmath.expj(2 * mpmath.im(lg))
        val = unit_g2 * abs(f2) / f2
    with mp.workprec(prec):
        return +val


def default_r_grid(a: int, b: int, points: int = 200) -> list[Fraction]:
    lo, hi = Fraction(1), Fraction(a - 1, 3 * b)
    if hi < lo:
        return []
    return [lo + (hi - lo) * Fraction(i, points) for i in range(points + 1)]


def scan_exceptional(a: int, b: int, lam: int, grid=None, tol: float = 1e-6, prec: int = 128) -> list[Fraction]:
    """Grid points r with |Psi_lambda(r) + 1| < tol (a heuristic for the exceptional set)."""
    if grid is None:
        grid = default_r_grid(a, b)
    hits = []
    for r in grid:
        val = psi(SaddleParams(a, b, r), lam, None, prec)
        if abs(val + 1) < tol:
            hits.append(to_fraction(r))
    return hits
