"""Dimension lower bounds (b+1)/2 * (1 - log alpha / log Q) over a list of (a, b) pairs.

    python3 scripts/bound_table.py --pairs 9,1 15,1 45,5 149,1 --density 64
"""
import argparse
import sys

import mpmath

from zetaforms.bounds import dim_lower_bound, evaluate, r_max
from zetaforms.report import to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", nargs="+", default=["9,1", "15,1", "27,3", "45,5", "149,1", "447,3"])
    ap.add_argument("--density", type=int, default=64)
    ap.add_argument("--prec-bits", type=int, default=128)
    args = ap.parse_args()
    rows = []
    for pair in args.pairs:
        a, b = (int(x) for x in pair.split(","))
        top = r_max(a, b, args.prec_bits)
        if top is None:
            rows.append([a, b, "", "", "", ""])
            continue
        at_one = evaluate(1, a, b, args.prec_bits)
        best = dim_lower_bound(a, b, args.density, args.prec_bits)
        rows.append([a, b, mpmath.nstr(top, 10), mpmath.nstr(at_one.dim_bound, 10), mpmath.nstr(mpmath.mpf(best.r), 10), mpmath.nstr(best.dim_bound, 10)])
    sys.stdout.write(to_csv(["a", "b", "r_max", "bound_at_r_1", "best_r", "best_bound"], rows))


if __name__ == "__main__":
    main()
