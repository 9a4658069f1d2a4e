"""The acceptance criteria, shared by ``zetaforms verify`` and the test suite.

Each check returns a CriterionResult; ``run`` prints one line per criterion.
Reference constants checked by the criteria are kept in REFERENCE so
they are visible in one place.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, mpf

REFERENCE = {
    "mu1_149": "23.000098741335222328",
    "re_f_149_1_11": "-888.37670633097801804",
    "varpi": "17.068934571314868572",
    "log_alpha_slope": "-605.44564090229288661",
    "log_Q_slope": "603.22318322365212580",
    "th70_margin": "0.24",
    "cor82_margin": "0.4",
}


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.cid:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _rel(x, y):
    return abs(x - y) / abs(y)


def crit_mu1() -> tuple[bool, str]:
    from .saddle import SaddleParams, locate_mu1

    mu1 = locate_mu1(SaddleParams(149, 1, 11), 256)
    err = _rel(mu1, mpf(REFERENCE["mu1_149"]))
    return err < mpf("1e-15"), f"mu1={mpmath.nstr(mu1, 21)} rel.err={mpmath.nstr(err, 3)}"


def crit_re_f() -> tuple[bool, str]:
    from .saddle import SaddleParams, eval_f, locate_mu1

    with mp.workprec(256):
        params = SaddleParams(149, 1, 11)
        mu1 = locate_mu1(params, 256)
        val = mpmath.re(eval_f(mu1, params, 256, upper=True))
        err = _rel(val, mpf(REFERENCE["re_f_149_1_11"]))
        return err < mpf("1e-12"), f"Re f={mpmath.nstr(val, 21)} rel.err={mpmath.nstr(err, 3)}"


def crit_th145() -> tuple[bool, str]:
    from .bounds import plan_th145

    with mp.workprec(256):
        base = plan_th145(1, 256, REFERENCE["varpi"])
        la, lq = base.params["log_alpha"], base.params["log_Q"]
        ea = _rel(la, mpf(REFERENCE["log_alpha_slope"]) - 2)
        eq = _rel(lq, mpf(REFERENCE["log_Q_slope"]) - 2)
        ok = ea < mpf("1e-9") and eq < mpf("1e-9")
        parts = [f"log a'={mpmath.nstr(la, 15)} (rel {mpmath.nstr(ea, 2)})", f"log Q'={mpmath.nstr(lq, 15)} (rel {mpmath.nstr(eq, 2)})"]
        re_f = base.params["re_f_per_b"]
        for D in (1, 3, 20001, 30001):
            rep = plan_th145(D, 256, REFERENCE["varpi"], re_f=re_f)
            good = rep.margin > 0 and rep.passed
            ok = ok and good
            parts.append(f"D={D} margin={mpmath.nstr(rep.margin, 6)}{'' if good else ' (not positive)'}")
    return ok, "; ".join(parts)


def crit_planners() -> tuple[bool, str]:
    from .bounds import plan_cor82, plan_th70

    th70 = plan_th70(Fraction(1, 20), 20**240, 1, 256)
    cor = plan_cor82(Fraction(1, 20), 256)
    ok70 = th70.margin > mpf(REFERENCE["th70_margin"]) and th70.passed
    ok82 = cor.margin > mpf(REFERENCE["cor82_margin"]) and cor.passed
    failed = [c.name for c in th70.checks if not c.holds]
    detail = (
        f"th70 margin={mpmath.nstr(th70.margin, 6)} "
        + (f"(failing: {', '.join(failed)}) " if failed else "")
        + f"cor82 margin={mpmath.nstr(cor.margin, 6)}"
    )
    return bool(ok70 and ok82), detail


FORM_CASES = ((3, 1, Fraction(0)), (3, 1, Fraction(1)), (9, 1, Fraction(1)), (9, 3, Fraction(1)), (15, 3, Fraction(1)), (15, 3, Fraction(3, 2)))


def check_form_case(a: int, b: int, r: Fraction, n: int, prec: int = 192) -> tuple[bool, str]:
    """All exact structure facts plus the two-route numerical agreement for one (a,b,r,n)."""
    from .hyperforms import FormParams, eval_form, eval_series, extract_linear_form, partial_fractions

    params = FormParams(a, b, r, n)
    pf = partial_fractions(params)
    if pf.column_sum(1) != 0:
        return False, f"{params}: sum c_1 != 0"
    for i in range(2, a + 1, 2):
        if pf.column_sum(i) != 0:
            return False, f"{params}: sum c_{i} != 0"
    form = extract_linear_form(params)
    if not form.denominators_ok():
        return False, f"{params}: denominators"
    worst = mpf(0)
    with mp.workprec(prec):
        for beta in params.E:
            diff = abs(eval_form(form, beta, prec) - eval_series(params, beta, prec))
            worst = max(worst, diff)
    if not worst < mpf("1e-30"):
        return False, f"{params}: |form - series| = {mpmath.nstr(worst, 3)}"
    return True, mpmath.nstr(worst, 3)


def crit_forms() -> tuple[bool, str]:
    count = 0
    for a, b, r in FORM_CASES:
        for n in range(1, 13):
            if (r * n).denominator != 1:
                continue
            ok, msg = check_form_case(a, b, r, n)
            if not ok:
                return False, msg
            count += 1
    return True, f"{count} parameter sets, all exact checks hold, eval routes agree"


def crit_growth() -> tuple[bool, str]:
    from .hyperforms import growth_diagnostics
    from .saddle import SaddleParams, eval_f, locate_mu1

    params = SaddleParams(9, 1, 1)
    with mp.workprec(128):
        re_f = mpmath.re(eval_f(locate_mu1(params, 128), params, 128, upper=True))
        rows = growth_diagnostics(9, 1, 1, (8, 16, 24), 128)
        devs = [_rel(row.log_rate, re_f) for row in rows]
        ok = devs[-1] < mpf("0.15") and devs[0] > devs[1] > devs[2]
        shown = ", ".join(f"n={row.n}: {mpmath.nstr(d, 4)}" for row, d in zip(rows, devs))
    return bool(ok), f"Re f={mpmath.nstr(re_f, 10)}; rel. deviation {shown}"


def cot_sum(beta: int, z):
    """sum over n in Z of (z + n pi)^-beta, computed from Hurwitz zeta (beta >= 2) or cot (beta = 1)."""
    if beta == 1:
        return mpmath.cot(z)
    x = z / mpmath.pi
    return mpmath.pi ** (-beta) * (mpmath.zeta(beta, x) + (-1) ** beta * mpmath.zeta(beta, 1 - x))


def trig_identity_error(b: int, points: int, rng: random.Random, prec: int = 160) -> mpf:
    from .cotangent import build_basis

    basis = build_basis(b)
    worst = mpf(0)
    with mp.workprec(prec):
        for _ in range(points):
            z = mpf(rng.uniform(0.05, 3.09))
            s = mpmath.sin(z) ** b
            for beta in basis.E:
                lhs = s * cot_sum(beta, z)
                rhs = sum(2 * mpmath.cos(lam * z) * mpmath.mpf(basis.c_entry(lam, beta).numerator) / basis.c_entry(lam, beta).denominator for lam in basis.E)
                worst = max(worst, abs(lhs - rhs))
    return worst


def crit_cotangent() -> tuple[bool, str]:
    from .cotangent import build_basis

    want = ((Fraction(1, 8), Fraction(1, 2)), (Fraction(-1, 8), Fraction(0)))
    if build_basis(3).c != want:
        return False, f"b=3 matrix is {build_basis(3).c}"
    for b in range(1, 26, 2):
        basis = build_basis(b)
        prod = [[sum(basis.c[i][j] * basis.d[j][l] for j in range(basis.k)) for l in range(basis.k)] for i in range(basis.k)]
        if any(prod[i][l] != (i == l) for i in range(basis.k) for l in range(basis.k)):
            return False, f"b={b}: c d != I"
        if basis.c_entry(b, 1) == 0:
            return False, f"b={b}: c[b,1] = 0"
        if any(basis.c_entry(b, beta) != 0 for beta in basis.E if beta >= 3):
            return False, f"b={b}: c[b,beta] != 0 for some beta >= 3"
    rng = random.Random(20261016)
    worst = max(trig_identity_error(b, 200, rng) for b in range(1, 12, 2))
    return bool(worst < mpf("1e-25")), f"b=3 exact, invertible b<=25, identity max err {mpmath.nstr(worst, 3)}"


def crit_saddle_structure() -> tuple[bool, str]:
    from .saddle import PHI_TOLERANCE, SaddleParams, _dist_to_half_pi, asymptotics, dist_mod_pi

    params = SaddleParams(45, 5, 2)
    data = asymptotics(params, 256)
    problems = []
    with mp.workprec(256):
        if max(data.fp_residual.values()) >= mpf("1e-20"):
            problems.append("f' residual")
        if not (mpmath.re(data.rho[1]) < mpmath.re(data.rho[3]) < data.mu1):
            problems.append("Re rho order")
        e1, e3, e5 = data.eps[1], data.eps[3], data.eps[5]
        cap = mpf(2) ** (2 * 5 * 3) / mpf(2) ** (2 * (45 - 20))
        if not (0 < e1 < e3 < e5 <= cap):
            problems.append("eps order/cap")
        if dist_mod_pi(data.phi[5]) >= mpf("1e-20"):
            problems.append("phi_5 mod pi")
        if any(_dist_to_half_pi(data.phi[lam]) <= PHI_TOLERANCE for lam in params.E):
            problems.append("phi near pi/2")
    if problems:
        return False, "failing: " + ", ".join(problems)
    return True, f"eps = {', '.join(mpmath.nstr(data.eps[l], 4) for l in params.E)}"


def crit_psi_limit() -> tuple[bool, str]:
    from .saddle import SaddleParams, psi

    parts, ok = [], True
    for lam in (1, 3):
        val = psi(SaddleParams(45, 5, 2), lam, Fraction(1, 1000), 192)
        with mp.workprec(192):
            err = abs(val + mpmath.expj(-lam * mpmath.pi / 5))
        ok = ok and err < mpf("1e-2")
        parts.append(f"lambda={lam}: {mpmath.nstr(err, 3)}")
    return ok, "; ".join(parts)


EXTRACTION_SEED = 7321
EXTRACTION_COUNT = 500


def extraction_corpus(count: int = EXTRACTION_COUNT, seed: int = EXTRACTION_SEED):
    from .extract import random_instance, random_request

    rng = random.Random(seed)
    for _ in range(count):
        inst = random_instance(rng)
        yield inst, random_request(rng, inst)


def crit_extraction() -> tuple[bool, str]:
    from .extract import PreconditionError, brute_force, certify, extract, family_rank, rank_threshold

    covered = violated = 0
    for inst, req in extraction_corpus():
        pre = family_rank(inst) > rank_threshold(inst.k, req.delta, req.p, req.q)
        try:
            out = extract(inst, req)
        except PreconditionError:
            out = None
        if pre:
            covered += 1
            bf = brute_force(inst, req)
            if out is None or bf is None:
                return False, f"extract={out} brute_force={bf} for {inst.to_json()} {req.to_json()}"
            if not certify(inst, req, out) or not certify(inst, req, bf):
                return False, f"certify failed for {inst.to_json()} {req.to_json()}"
        else:
            violated += 1
            if out is not None:
                return False, "extract returned a result without the rank precondition"
    return True, f"{covered} instances under the precondition agree and certify; {violated} rejected"


def crit_bounds() -> tuple[bool, str]:
    from .bounds import dim_lower_bound, evaluate

    at_one = evaluate(1, 9, 1, 128).dim_bound
    coarse = dim_lower_bound(9, 1, 64, 128)
    fine = dim_lower_bound(9, 1, 128, 128)
    with mp.workprec(128):
        drift = _rel(fine.dim_bound, coarse.dim_bound)
    ok = mpf("0.35") < at_one < mpf("0.45") and drift < mpf("1e-6")
    return bool(ok), (
        f"bound at r=1 {mpmath.nstr(at_one, 8)}; sup {mpmath.nstr(coarse.dim_bound, 8)} at r={mpmath.nstr(coarse.r, 8)}; "
        f"grid doubling rel. drift {mpmath.nstr(drift, 3)}"
    )


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("mu1 for (149,1,11)", crit_mu1),
    2: ("Re f(mu1) for (149,1,11)", crit_re_f),
    3: ("interval-statement constants and margins", crit_th145),
    4: ("planner margins", crit_planners),
    5: ("exact form structure", crit_forms),
    6: ("asymptotic consistency (9,1,1)", crit_growth),
    7: ("cotangent basis", crit_cotangent),
    8: ("saddle structure (45,5,2)", crit_saddle_structure),
    9: ("Psi limit (45,5)", crit_psi_limit),
    10: ("spread extraction corpus", crit_extraction),
    11: ("bound engine sanity (9,1)", crit_bounds),
}


def run_one(cid: int) -> CriterionResult:
    title, fun = CRITERIA[cid]
    t0 = time.perf_counter()
    try:
        ok, detail = fun()
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(cid, title, bool(ok), detail, time.perf_counter() - t0)


def run(ids=None, echo=print) -> list[CriterionResult]:
    results = []
    for cid in sorted(ids or CRITERIA):
        res = run_one(cid)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
