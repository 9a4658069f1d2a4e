"""Lower bounds for the rank of odd zeta values, and the parameter planners.

Everything is computed in log space with mpmath reals, since the planners
reach parameters such as a ~ 20^240 that overflow doubles. Integers a, b, r
stay exact Python ints wherever they are used as integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .numerics import DEFAULT_PREC, check_prec, fraction_to_mpf, to_fraction

PI_CONSTANT_DEFAULT = "17.068934571314868572"


def _mp(x):
    if isinstance(x, (Fraction, int)):
        return fraction_to_mpf(Fraction(x))
    return mpmath.mpmathify(x)


def _split(r) -> tuple[int, mpf]:
    """Integer and fractional part of r as (int, mpf)."""
    if isinstance(r, (int, Fraction)):
        r = Fraction(r)
        ri = math.floor(r)
        return ri, fraction_to_mpf(r - ri)
    r = mpmath.mpmathify(r)
    ri = int(mpmath.floor(r))
    return ri, r - ri


def _xlogx(x) -> mpf:
    return mpf(0) if x == 0 else x * mpmath.log(x)


def _log_alpha_parts(r_int: int, r_frac, a: int, b: int) -> mpf:
    r = r_int + r_frac
    return (
        2 * (a + b - 1)
        + 2 * b * (r + 1) * mpmath.log(2)
        - 2 * (a - 2 * b * r) * mpmath.log(r)
        - 4 * b * _xlogx(r_frac)
    )


def _log_Q_parts(r_int: int, r_frac, a: int, b: int) -> mpf:
    r = r_int + r_frac
    frac_term = mpf(0) if r_frac == 0 else 4 * b * r_frac * mpmath.log(2 * r_frac)
    return (
        2 * (a + b - 1)
        + 2 * (a - 2 * b * r_int) * mpmath.log(2)
        + 2 * b * (2 * r + 1) * mpmath.log(2 * r + 1)
        - frac_term
    )


def _check_r(r) -> None:
    if r < 1:
        raise ValueError(f"bounds need r >= 1, got {r}")


def log_alpha(r, a: int, b: int, prec: int = DEFAULT_PREC) -> mpf:
    """log of e^{2(a+b-1)} 2^{2b(r+1)} / (r^{2(a-2br)} {r}^{4b{r}})."""
    _check_r(r)
    with mp.workprec(prec + 32):
        ri, rf = _split(r)
        val = _log_alpha_parts(ri, rf, a, b)
    with mp.workprec(prec):
        return +val


def log_Q_bound(r, a: int, b: int, prec: int = DEFAULT_PREC) -> mpf:
    """log of e^{2(a+b-1)} 2^{2(a-2b[r])} (2r+1)^{2b(2r+1)} / (2{r})^{4b{r}}."""
    _check_r(r)
    with mp.workprec(prec + 32):
        ri, rf = _split(r)
        val = _log_Q_parts(ri, rf, a, b)
    with mp.workprec(prec):
        return +val


@dataclass
class BoundEvaluation:
    r: object
    log_alpha: mpf
    log_Q: mpf
    ratio: mpf
    dim_bound: mpf
    b: int

    def to_json(self, prec: int) -> dict:
        from .report import real_json

        r = self.r
        r_json = str(r) if isinstance(r, (int, Fraction)) else real_json(r, prec)
        return {
            "r": r_json,
            "log_alpha": real_json(self.log_alpha, prec),
            "log_Q": real_json(self.log_Q, prec),
            "ratio": real_json(self.ratio, prec),
            "dim_bound": real_json(self.dim_bound, prec),
        }


def evaluate(r, a: int, b: int, prec: int = DEFAULT_PREC) -> BoundEvaluation:
    la = log_alpha(r, a, b, prec)
    lq = log_Q_bound(r, a, b, prec)
    with mp.workprec(prec):
        ratio = 1 - la / lq
        return BoundEvaluation(r, la, lq, ratio, mpf(b + 1) / 2 * ratio, b)


def left_limit(m: int, a: int, b: int, prec: int = DEFAULT_PREC) -> tuple[mpf, mpf]:
    """(log alpha, log Q) as r tends to the integer m from below."""
    with mp.workprec(prec + 32):
        la = _log_alpha_parts(m - 1, mpf(1), a, b)
        lq = _log_Q_parts(m - 1, mpf(1), a, b)
    with mp.workprec(prec):
        return +la, +lq


def r_max(a: int, b: int, prec: int = DEFAULT_PREC):
    """Largest r >= 1 with (9/2) b r log(4r+3) <= a, or None when a < 9b.

    Solved by bisection on u = log r so that huge a/b stays cheap.
    """
    if a < 9 * b:
        return None
    with mp.workprec(prec + 32):
        target = mpmath.log(a)

        def lhs(u):
            r = mpmath.exp(u)
            return mpmath.log(mpf(9) / 2 * b) + u + mpmath.log(mpmath.log(4 * r + 3))

        lo, hi = mpf(0), mpmath.log(mpf(a) / b) + 1
        if lhs(lo) > target:
            return None
        tol = mpf(2) ** (-(prec + 8))
        while hi - lo > tol * max(hi, 1):
            mid = (lo + hi) / 2
            if lhs(mid) <= target:
                lo = mid
            else:
                hi = mid
        val = mpmath.exp(lo)
    with mp.workprec(prec):
        return +val


def _golden_max(fun, lo, hi, iters: int):
    invphi = (mpmath.sqrt(5) - 1) / 2
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


LINEAR_GRID_LIMIT = 4096


def dim_lower_bound(a: int, b: int, density: int = 64, prec: int = 128, refine: int = 80) -> BoundEvaluation:
    """Maximise ((b+1)/2)(1 - log alpha / log Q) over r in [1, r_max].

    For moderate r_max each unit interval [m, m+1) is sampled ``density``
    times, with the integer m and the left limit at m+1 as explicit points;
    the best sample is refined by golden-section search inside its unit
    interval. For huge r_max the grid and the refinement run in log r.
    """
    rm = r_max(a, b, prec)
    if rm is None:
        raise ValueError(f"I_(a,b) is empty for a={a}, b={b}")
    with mp.workprec(prec + 32):

        def objective(r):
            ri, rf = _split(r)
            lq = _log_Q_parts(ri, rf, a, b)
            return 1 - _log_alpha_parts(ri, rf, a, b) / lq

        best_r, best_v = mpf(1), objective(mpf(1))
        candidates = []
        if rm <= LINEAR_GRID_LIMIT:
            top = int(mpmath.floor(rm))
            for m in range(1, top + 1):
                hi = min(mpf(m + 1), rm)
                pts = [mpf(m) + (hi - m) * mpf(i) / density for i in range(density + 1)]
                vals = []
                for x in pts:
                    if x >= m + 1:  # left limit at the next integer
                        la, lq = _log_alpha_parts(m, mpf(1), a, b), _log_Q_parts(m, mpf(1), a, b)
                        vals.append(1 - la / lq)
                    else:
                        vals.append(objective(x))
                i = max(range(len(pts)), key=lambda j: (vals[j], -j))
                candidates.append((pts[i], vals[i]))
                lo_i, hi_i = pts[max(i - 1, 0)], pts[min(i + 1, len(pts) - 1)]
                if hi_i >= m + 1:
                    hi_i = m + 1 - mpf(2) ** (-prec)
                if hi_i > lo_i:
                    x, v = _golden_max(objective, lo_i, hi_i, refine)
                    candidates.append((x, v))
        else:
            umax = mpmath.log(rm)
            count = density * 64
            us = [umax * mpf(i) / count for i in range(count + 1)]
            vals = [objective(mpmath.exp(u)) for u in us]
            i = max(range(len(us)), key=lambda j: (vals[j], -j))
            candidates.append((mpmath.exp(us[i]), vals[i]))
            lo_u, hi_u = us[max(i - 1, 0)], us[min(i + 1, count)]
            u, v = _golden_max(lambda u: objective(mpmath.exp(u)), lo_u, hi_u, refine)
            candidates.append((mpmath.exp(u), v))
        for x, v in candidates:
            if v > best_v or (v == best_v and x < best_r):
                best_r, best_v = x, v
    if abs(best_r - round(best_r)) < mpf(2) ** (-prec + 16):
        best_r = int(round(best_r))
    return evaluate(best_r, a, b, prec)


@dataclass
class TauVector:
    tau: list

    def __post_init__(self):
        for x, y in zip(self.tau, self.tau[1:]):
            if not x > y:
                raise ValueError("tau must be strictly decreasing")

    @property
    def k(self) -> int:
        return len(self.tau)


def criterion_rank_bound(k: int, tau: TauVector) -> mpf:
    if tau.k != k:
        raise ValueError(f"expected {k} tau values, got {tau.k}")
    TauVector(list(tau.tau))
    return k + mpmath.fsum(tau.tau)


def refined_rank_bound(t: int, tau: TauVector) -> mpf:
    """t + tau_{k+1-t} + ... + tau_k."""
    TauVector(list(tau.tau))
    if not 1 <= t <= tau.k:
        raise ValueError(f"t must lie in [1, {tau.k}]")
    return t + mpmath.fsum(tau.tau[tau.k - t:])


def tau_from_eps(eps: dict, r, a: int, b: int, prec: int = DEFAULT_PREC) -> TauVector:
    """tau_{(lam+1)/2} = -(2(a+b-1) + log eps_lam - 4b{r}log{r}) / log Q."""
    lams = sorted(eps)
    for x, y in zip(lams, lams[1:]):
        if not eps[x] < eps[y]:
            raise ValueError("eps must increase strictly with lambda")
    lq = log_Q_bound(r, a, b, prec)
    with mp.workprec(prec):
        _, rf = _split(r)
        corr = 4 * b * _xlogx(rf)
        tau = [-(2 * (a + b - 1) + mpmath.log(eps[lam]) - corr) / lq for lam in lams]
    return TauVector(tau)


# --------------------------------------------------------------------------
# planners


@dataclass
class Check:
    name: str
    lhs: object
    rhs: object
    relation: str
    holds: bool


@dataclass
class PlanReport:
    kind: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    margin: mpf | None = None
    prec: int = DEFAULT_PREC
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)

    def add(self, name: str, lhs, relation: str, rhs) -> bool:
        with mp.workprec(self.prec):
            ops = {
                "<": lambda x, y: x < y,
                "<=": lambda x, y: x <= y,
                ">": lambda x, y: x > y,
                ">=": lambda x, y: x >= y,
                "==": lambda x, y: x == y,
            }
            ok = bool(ops[relation](lhs, rhs))
        self.checks.append(Check(name, lhs, rhs, relation, ok))
        return ok

    def to_json(self) -> dict:
        from .report import real_json

        def enc(x):
            if isinstance(x, bool):
                return x
            if isinstance(x, int):
                return str(x) if abs(x) > 2**53 else x
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, (mpf, mpmath.mpc)):
                return real_json(x, self.prec)
            return x

        return {
            "kind": self.kind,
            "params": {k: enc(v) for k, v in self.params.items()},
            "checks": [
                {"name": c.name, "lhs": enc(c.lhs), "relation": c.relation, "rhs": enc(c.rhs), "holds": c.holds}
                for c in self.checks
            ],
            "margin": enc(self.margin) if self.margin is not None else None,
            "passed": self.passed,
            "notes": self.notes,
        }


def _ceil_odd_above(x: Fraction) -> int:
    """Least odd integer strictly greater than x."""
    n = math.floor(x) + 1
    return n if n % 2 else n + 1


def _odd_multiple_in(b: int, lo: int, hi: int) -> int | None:
    m = hi // b
    if m % 2 == 0:
        m -= 1
    a = m * b
    return a if a >= lo and m > 0 else None


def _log_ratio_threshold(eps: Fraction, prec: int) -> mpf:
    """log of eps^{-12/eps}."""
    return 12 / fraction_to_mpf(eps) * mpmath.log(1 / fraction_to_mpf(eps))


def plan_th70(eps, A: int, D: int, prec: int = DEFAULT_PREC) -> PlanReport:
    """Parameters (b, a, r, N) and the inequality k(-log alpha/log Q) > (k+2D)N."""
    eps = to_fraction(eps)
    check_prec(prec)
    if not (0 < eps <= Fraction(1, 20)):
        raise ValueError("need 0 < eps <= 1/20")
    if D < 1 or A < D:
        raise ValueError("need A >= D >= 1")
    rep = PlanReport("th70", {"eps": eps, "A": A, "D": D}, prec=prec)
    # numbers like A ~ 20^240 need bits beyond the requested precision
    wp = prec + 2 * max(A.bit_length(), 64) + 64
    with mp.workprec(wp):
        log_AD = mpmath.log(mpf(A)) - mpmath.log(mpf(D))
        e12 = 12 / eps
        if e12.denominator == 1:
            thr_ok = Fraction(A, D) >= (1 / eps) ** int(e12)
            rep.checks.append(Check("A >= eps^(-12/eps) D (exact)", A, f"(1/eps)^{int(e12)}*D", ">=", thr_ok))
        else:
            rep.add("log(A/D) >= (12/eps) log(1/eps)", log_AD, ">=", _log_ratio_threshold(eps, wp))
        if not rep.checks[-1].holds:
            rep.notes.append("precondition A >= eps^(-12/eps) D fails")
            return rep
        b = _ceil_odd_above(1 + 8 * D / eps)
        rep.add("1+8D/eps < b", fraction_to_mpf(1 + 8 * D / eps), "<", mpf(b))
        rep.add("b < 9D/eps", mpf(b), "<", fraction_to_mpf(9 * D / eps))
        a = _odd_multiple_in(b, A - 3 * b + 2, A - b + 1)
        if a is None:
            rep.notes.append("no odd multiple of b in [A-3b+2, A-b+1]")
            rep.checks.append(Check("odd multiple of b in window", None, None, "exists", False))
            return rep
        rep.checks.append(Check("A-3b+2 <= a <= A-b+1, b | a", a, (A - 3 * b + 2, A - b + 1), "in", a % b == 0 and a % 2 == 1))
        rep.add("a >= 9b", a, ">=", 9 * b)
        log_r_real = (1 - fraction_to_mpf(eps) / 3) * log_AD
        r = int(mpmath.floor(mpmath.exp(log_r_real)))
        N = int(mpmath.floor(fraction_to_mpf(1 - eps) / (1 + mpmath.log(2)) * log_AD))
        k = (b + 1) // 2
        rep.add("(9/2) b r log(4r+3) <= a", mpf(9) / 2 * b * r * mpmath.log(4 * mpf(r) + 3), "<=", mpf(a))
        la = _log_alpha_parts(r, mpf(0), a, b)
        lq = _log_Q_parts(r, mpf(0), a, b)
        lhs = k * (-la / lq)
        rhs = mpf((k + 2 * D) * N)
        rep.add("k(-log alpha/log Q) > (k+2D)N", lhs, ">", rhs)
        margin = -la / lq - mpf(k + 2 * D) * N / k
        rep.params.update({"b": b, "a": a, "r": r, "N": N, "k": k, "delta": Fraction(D, 2), "log_alpha": la, "log_Q": lq})
        # diagnostic only: the same margin at the best real r in I_(a,b)
        rm = r_max(a, b, prec)
    with mp.workprec(prec + 64):
        if rm is not None:

            def at(u):
                ri, rf = _split(mpmath.exp(u))
                return -_log_alpha_parts(ri, rf, a, b) / _log_Q_parts(ri, rf, a, b)

            top = mpmath.log(rm)
            us = [top * mpf(i) / 256 for i in range(257)]
            i = max(range(257), key=lambda j: at(us[j]))
            u, v = _golden_max(at, us[max(i - 1, 0)], us[min(i + 1, 256)], 120)
            rep.params["best_r_log"] = u
            rep.params["best_r_margin"] = v - mpf(k + 2 * D) * N / k
    with mp.workprec(prec):
        rep.margin = +margin
        rep.params = {k_: (+v if isinstance(v, mpf) else v) for k_, v in rep.params.items()}
    return rep


TH145_B_FACTOR = Fraction("0.99347748344370860927")
TH145_T_FACTOR = Fraction("0.0032612582781456953642")
TH145_DELTA_FACTOR = Fraction("3.0038668538740336935e-6")
TH145_SMALL_D = 20000


def plan_th145(D: int, prec: int = DEFAULT_PREC, pi_constant: str = PI_CONSTANT_DEFAULT, re_f=None) -> PlanReport:
    """Parameters for the (D, 151 D) interval statement and its margin.

    ``re_f`` is Re f(mu1+i0) for (a, b, r) = (149, 1, 11); it is computed by
    the saddle module when not supplied.
    """
    if D < 1 or D % 2 == 0:
        raise ValueError("D must be an odd positive integer")
    if D <= TH145_SMALL_D:
        b, t, delta = D, 1, Fraction(0)
    else:
        b = math.ceil(Fraction(D) / TH145_B_FACTOR)
        if b % 2 == 0:
            b += 1
        t = math.floor(TH145_T_FACTOR * b)
        delta = TH145_DELTA_FACTOR * b
    a, r = 149 * b, 11
    k = (b + 1) // 2
    if re_f is None:
        from .saddle import SaddleParams, eval_f, locate_mu1

        base = SaddleParams(149, 1, 11)
        mu1 = locate_mu1(base, prec)
        re_f = mpmath.re(eval_f(mu1, base, prec, upper=True))
    rep = PlanReport("th145", {"D": D, "b": b, "a": a, "r": r, "k": k, "t": t, "delta": delta, "pi_constant": pi_constant}, prec=prec)
    with mp.workprec(prec + 32):
        varpi = mpf(pi_constant)
        common = 2 * (a + b - 1) - b * varpi
        la = common + b * re_f
        lq = common + 2 * (a - 2 * b * r) * mpmath.log(2) + 2 * b * (2 * r + 1) * mpmath.log(2 * r + 1)
        lhs = -t * la / lq
        rhs = t + 4 * fraction_to_mpf(delta)
        if D > TH145_SMALL_D:
            rep.add("D <= 0.9934...*b", mpf(D), "<=", fraction_to_mpf(TH145_B_FACTOR * b))
            rep.add("150b <= 151D", 150 * b, "<=", 151 * D)
        rep.add("1 <= t <= k", t, ">=", 1)
        rep.add("t <= k", t, "<=", k)
        rep.add("-t log alpha'/log Q' > t + 4 delta", lhs, ">", rhs)
        margin = lhs - rhs
        # a rank is an integer, so the bound lhs also gives rank >= ceil(lhs)
        integer_margin = mpmath.ceil(lhs) - rhs
        rep.params.update({"log_alpha": la, "log_Q": lq, "re_f_per_b": re_f, "integer_rank_margin": integer_margin})
    with mp.workprec(prec):
        rep.margin = +margin
    interval = mpf(9) / 2 * b * r * mpmath.log(4 * r + 3) <= a
    rep.notes.append(
        "interval condition (9/2) b r log(4r+3) <= a "
        + ("holds" if interval else "fails; the mu1-based estimate is used instead")
    )
    return rep


def plan_cor82(eps, prec: int = DEFAULT_PREC) -> PlanReport:
    """eps' , C, M, D for the chained construction and C+1 <= D < 1/eta."""
    eps = to_fraction(eps)
    if not (0 < eps <= Fraction(1, 20)):
        raise ValueError("need 0 < eps <= 1/20")
    rep = PlanReport("cor82", {"eps": eps}, prec=prec)
    with mp.workprec(prec + 64):
        e = fraction_to_mpf(eps)
        e1 = e - e / (3 * mpmath.log(1 / e))
        log_C = 12 / e1 * mpmath.log(1 / e1)
        M = int(mpmath.floor((1 - e1) / (1 + mpmath.log(2)) * log_C))
        log_D = (1 + e) * M * (1 + mpmath.log(2))
        log_eta_inv = 15 / e * mpmath.log(1 / e)
        # log(C+1) = log C + log1p(1/C)
        log_C1 = log_C + mpmath.log1p(mpmath.exp(-log_C))
        rep.add("log(C+1) <= log D", log_C1, "<=", log_D)
        rep.add("log D < log(1/eta)", log_D, "<", log_eta_inv)
        rep.add("log D <= 1.006 log C", log_D, "<=", mpf("1.006") * log_C)
        rep.add("1.006 log C < log(1/eta)", mpf("1.006") * log_C, "<", log_eta_inv)
        margin = log_D - log_C1
        rep.params.update({"eps_prime": e1, "log_C": log_C, "M": M, "log_D": log_D, "log_eta_inv": log_eta_inv})
    with mp.workprec(prec):
        rep.margin = +margin
    return rep


# --------------------------------------------------------------------------
# tables


def bound_table(a: int, b: int, rs, prec: int = 64) -> list[list[str]]:
    rows = []
    for r in rs:
        ev = evaluate(r, a, b, prec)
        rows.append([str(r), mpmath.nstr(ev.log_alpha, 15), mpmath.nstr(ev.log_Q, 15), mpmath.nstr(ev.ratio, 15)])
    return rows


BOUND_TABLE_HEADER = ["r", "log_alpha", "log_Q", "ratio"]
