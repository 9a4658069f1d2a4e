"""Scan r for points where Psi_lambda(r) comes close to -1 (candidates for the exceptional set).

    python3 scripts/exceptional_scan.py --a 45 --b 5 --points 100
"""
import argparse
import sys
from fractions import Fraction

import mpmath

from zetaforms.report import to_csv
from zetaforms.saddle import SaddleParams, default_r_grid, psi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=int, default=45)
    ap.add_argument("--b", type=int, default=5)
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--prec-bits", type=int, default=96)
    args = ap.parse_args()
    lams = [lam for lam in range(1, args.b, 2)]
    rows = []
    for r in default_r_grid(args.a, args.b, args.points):
        if r >= Fraction(args.a, 3 * args.b):
            continue
        params = SaddleParams(args.a, args.b, r)
        for lam in lams:
            val = psi(params, lam, None, args.prec_bits)
            dist = abs(val + 1)
            rows.append([str(r), lam, mpmath.nstr(val.real, 12), mpmath.nstr(val.imag, 12), mpmath.nstr(dist, 6), bool(dist < args.tol)])
    sys.stdout.write(to_csv(["r", "lambda", "re_psi", "im_psi", "dist_to_minus_one", "candidate"], rows))


if __name__ == "__main__":
    main()
