"""Command-line front end: ``zetaforms <command> [options]``.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input,
3 internal certification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import mpmath

from .numerics import DEFAULT_PREC, MIN_PREC, RootFindingError
from .report import COMPUTED, IMPORTED, dumps, envelope, rational_json, real_json, to_csv

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3
FORMATS = ("json", "csv")


class InvalidInput(ValueError):
    pass


class CertificationFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    prec_bits: int = DEFAULT_PREC
    format: str = "json"
    out: str | None = None
    grid: int = 64
    tol: float = 1e-6

    def __post_init__(self):
        if self.prec_bits < MIN_PREC:
            raise InvalidInput(f"precision must be at least {MIN_PREC} bits")
        if self.format not in FORMATS:
            raise InvalidInput(f"format must be one of {FORMATS}")
        if self.grid < 1:
            raise InvalidInput("grid density must be positive")

    @classmethod
    def from_sources(cls, config_file: str | None, overrides: dict) -> "RunConfig":
        values: dict = {}
        types = {f.name: f.type for f in fields(cls)}
        if config_file:
            for raw in Path(config_file).read_text().splitlines():
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidInput(f"config line without '=': {raw!r}")
                key, val = (s.strip() for s in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in types:
                    raise InvalidInput(f"unknown config key {key!r}")
                values[key] = val
        values.update({k: v for k, v in overrides.items() if v is not None})
        conv = {"prec_bits": int, "grid": int, "tol": float, "format": str, "out": str}
        try:
            return cls(**{k: conv[k](v) for k, v in values.items()})
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(str(exc)) from exc


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational number: {text!r}") from exc


def parse_big_int(text: str) -> int:
    """Integers written plainly or as base^exp (also base**exp), optionally times a factor: 3*25^300."""
    total = 1
    try:
        for factor in text.replace("**", "^").split("*"):
            if "^" in factor:
                base, exp = factor.split("^")
                total *= int(base) ** int(exp)
            else:
                total *= int(factor)
    except ValueError as exc:
        raise InvalidInput(f"not an integer expression: {text!r}") from exc
    return total


# --------------------------------------------------------------------------
# commands; each returns (document, csv rows or None, exit code)


def cmd_forms(args, cfg: RunConfig):
    from .hyperforms import FormParams, FormStructureError, eval_form, eval_series, extract_linear_form

    try:
        params = FormParams(args.a, args.b, parse_rational(args.r), args.n)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    prec = cfg.prec_bits
    try:
        form = extract_linear_form(params)
    except FormStructureError as exc:
        raise CertificationFailure(str(exc)) from exc
    checks = {"cancellations": True, "denominators": form.denominators_ok()}
    rows, values = [], {}
    tol = mpmath.mpf(2) ** (-prec // 2)
    for beta in params.E:
        with mpmath.mp.workprec(prec):
            vf = eval_form(form, beta, prec)
            vs = eval_series(params, beta, prec)
            diff = abs(vf - vs)
            agree = bool(diff < tol)
        checks[f"eval_agree_beta{beta}"] = agree
        values[str(beta)] = {"form": real_json(vf, prec), "series": real_json(vs, prec), "difference": real_json(diff, 64)}
        rows.append([beta, mpmath.nstr(vf, 30), mpmath.nstr(vs, 30), mpmath.nstr(diff, 5)])
    doc = {"form": form.to_json(), "values": values, "checks": checks, "passed": all(checks.values())}
    code = EXIT_OK if doc["passed"] else EXIT_FAILED
    return envelope("forms", doc, prec_bits=prec), (["beta", "form", "series", "difference"], rows), code


def cmd_cot_matrix(args, cfg: RunConfig):
    from .cotangent import build_basis

    if args.b < 1 or args.b % 2 == 0:
        raise InvalidInput("b must be a positive odd integer")
    basis = build_basis(args.b)
    rows = [[lam, beta, str(basis.c_entry(lam, beta))] for lam in basis.E for beta in basis.E]
    return envelope("cot-matrix", basis.to_json()), (["lambda", "beta", "c"], rows), EXIT_OK


def cmd_saddle(args, cfg: RunConfig):
    from .saddle import SaddleParams, asymptotics, eval_f

    try:
        params = SaddleParams(args.a, args.b, parse_rational(args.r))
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    prec = cfg.prec_bits
    data = asymptotics(params, prec, require=False)
    doc = data.to_json()
    with mpmath.mp.workprec(prec):
        f_mu1 = eval_f(data.mu1, params, prec, upper=True)
    doc["f_at_mu1"] = real_json(f_mu1, prec)
    rows = [
        [lam, mpmath.nstr(mpmath.re(data.rho[lam]), 25), mpmath.nstr(mpmath.im(data.rho[lam]), 25),
         mpmath.nstr(data.eps[lam], 20), mpmath.nstr(data.omega[lam], 20), mpmath.nstr(data.phi[lam], 20)]
        for lam in params.E
    ]
    code = EXIT_OK if data.hypotheses.saddle_ok else EXIT_FAILED
    return envelope("saddle", doc, prec_bits=prec), (["lambda", "re_rho", "im_rho", "eps", "omega", "phi"], rows), code


def cmd_bounds(args, cfg: RunConfig):
    from .bounds import BOUND_TABLE_HEADER, bound_table, dim_lower_bound, evaluate, r_max

    if args.b < 1 or args.b % 2 == 0 or args.a < 1 or args.a % 2 == 0:
        raise InvalidInput("a and b must be positive odd integers")
    prec = min(cfg.prec_bits, 128)
    at_one = evaluate(1, args.a, args.b, prec)
    best = dim_lower_bound(args.a, args.b, cfg.grid, prec)
    top = r_max(args.a, args.b, prec)
    doc = {
        "a": args.a,
        "b": args.b,
        "at_r_1": at_one.to_json(prec),
        "supremum": best.to_json(prec),
        "r_max": real_json(top, prec) if top is not None else None,
        "grid_density": cfg.grid,
    }
    hi = float(top) if top is not None else 1.0
    rs = [Fraction(1) + Fraction(i, cfg.grid) * Fraction(hi - 1).limit_denominator(10**12) for i in range(cfg.grid + 1)]
    return envelope("bounds", doc, prec_bits=prec), (BOUND_TABLE_HEADER, bound_table(args.a, args.b, rs, prec)), EXIT_OK


def cmd_plan(args, cfg: RunConfig):
    from .bounds import PI_CONSTANT_DEFAULT, plan_cor82, plan_th70, plan_th145

    prec = cfg.prec_bits
    try:
        if args.kind == "th70":
            rep = plan_th70(parse_rational(args.eps), parse_big_int(args.A), args.D, prec)
        elif args.kind == "th145":
            rep = plan_th145(args.D, prec, args.pi_constant or PI_CONSTANT_DEFAULT)
        else:
            rep = plan_cor82(parse_rational(args.eps), prec)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    doc = rep.to_json()
    if args.kind == "th145":
        doc["params"]["pi_constant"] = real_json(mpmath.mpf(rep.params["pi_constant"]), prec, IMPORTED)
    rows = [[c.name, str(c.lhs), c.relation, str(c.rhs), c.holds] for c in rep.checks]
    ok = rep.passed and rep.margin is not None and rep.margin > 0
    return envelope("plan", doc, prec_bits=prec), (["check", "lhs", "relation", "rhs", "holds"], rows), EXIT_OK if ok else EXIT_FAILED


def cmd_extract(args, cfg: RunConfig):
    from .extract import (ExtractionInstance, PreconditionError, RecursionCapError, SpreadRequest,
                          certify, extract, family_rank)

    try:
        obj = json.loads(Path(args.file).read_text())
        inst = ExtractionInstance.from_json(obj["instance"])
        req = SpreadRequest.from_json(obj["request"])
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise InvalidInput(f"bad extraction file: {exc}") from exc
    try:
        out = extract(inst, req)
    except PreconditionError as exc:
        raise InvalidInput(str(exc)) from exc
    except RecursionCapError as exc:
        raise CertificationFailure(f"{exc}; instance flagged for study") from exc
    ok = certify(inst, req, out)
    if not ok:
        raise CertificationFailure(f"output {out} failed certification")
    doc = {"instance": inst.to_json(), "request": req.to_json(), "rank": family_rank(inst), "indices": out, "certified": ok}
    return envelope("extract", doc), (["index"], [[n] for n in out]), EXIT_OK


def cmd_zeta(args, cfg: RunConfig):
    from .numerics import zeta_int

    if args.s < 2:
        raise InvalidInput("s must be an integer >= 2")
    val = zeta_int(args.s, cfg.prec_bits)
    doc = {"s": args.s, "zeta": real_json(val, cfg.prec_bits, COMPUTED)}
    return envelope("zeta", doc, prec_bits=cfg.prec_bits), (["s", "zeta"], [[args.s, mpmath.nstr(val, 40)]]), EXIT_OK


def cmd_verify(args, cfg: RunConfig):
    from .acceptance import CRITERIA, run

    ids = args.only or sorted(CRITERIA)
    bad = [i for i in ids if i not in CRITERIA]
    if bad:
        raise InvalidInput(f"unknown criterion ids {bad}")
    results = run(ids, echo=lambda line: print(line, file=sys.stderr))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria pass", file=sys.stderr)
    doc = {"criteria": [{"id": r.cid, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results]}
    rows = [[r.cid, r.title, r.passed, r.detail] for r in results]
    code = EXIT_OK if passed == len(results) else EXIT_FAILED
    return envelope("verify", doc), (["id", "title", "passed", "detail"], rows), code


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec-bits", type=int, default=None, help=f"working precision (default {DEFAULT_PREC})")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--grid", type=int, default=None, help="grid density per unit interval")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--config", default=None, help="key=value file overriding defaults")

    parser = argparse.ArgumentParser(prog="zetaforms", description="Linear forms in odd zeta values: exact and high-precision tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forms", parents=[common], help="build and check one linear form family")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--r", required=True, help="rational, e.g. 3/2")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("cot-matrix", parents=[common], help="cotangent coefficient matrix for odd b")
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_cot_matrix)

    p = sub.add_parser("saddle", parents=[common], help="saddle points and asymptotic constants")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--r", required=True)
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("bounds", parents=[common], help="dimension lower bound for (a, b)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("plan", parents=[common], help="parameter planners")
    p.add_argument("kind", choices=("th70", "th145", "cor82"))
    p.add_argument("--eps", default="1/20")
    p.add_argument("--A", default=None, help="e.g. 20^240")
    p.add_argument("--D", "--d", dest="D", type=int, default=1)
    p.add_argument("--pi-constant", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("extract", parents=[common], help="spread extraction from a JSON instance file")
    p.add_argument("file")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("zeta", parents=[common], help="zeta(s) at integer s >= 2")
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="*", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_sources(
            args.config, {"prec_bits": args.prec_bits, "format": args.format, "out": args.out, "grid": args.grid, "tol": args.tol}
        )
        if args.command == "plan" and args.kind == "th70" and args.A is None:
            raise InvalidInput("plan th70 needs --A")
        doc, table, code = args.func(args, cfg)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CertificationFailure, RootFindingError) as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = dumps(doc) if cfg.format == "json" else to_csv(*table)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
