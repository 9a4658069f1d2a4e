"""JSON/CSV serialization shared by every report.

Exact rationals become {"num": "...", "den": "..."}; reals carry their
precision and provenance so a report can be re-read without loss.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import mpmath
from mpmath import mp

SCHEMA = "zetaforms-report/1"
COMPUTED = "computed"
IMPORTED = "imported-constant"


def rational_json(q) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def rational_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def real_str(x, prec: int) -> str:
    digits = max(15, int(prec * 0.30103))
    with mp.workprec(prec):
        return mpmath.nstr(mpmath.mpmathify(x), digits, strip_zeros=False, min_fixed=-5, max_fixed=30)


def real_json(x, prec: int, provenance: str = COMPUTED) -> dict:
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc):
        return {
            "re": real_str(x.real, prec),
            "im": real_str(x.imag, prec),
            "prec_bits": prec,
            "provenance": provenance,
        }
    return {"value": real_str(x, prec), "prec_bits": prec, "provenance": provenance}


def envelope(kind: str, payload: dict, **meta) -> dict:
    return {"schema": SCHEMA, "kind": kind, **meta, "result": payload}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
