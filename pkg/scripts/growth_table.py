"""n-th root growth of coefficients and of |I_{1,n}| against the saddle prediction.

    python3 scripts/growth_table.py --a 9 --b 1 --r 1 --n 4 8 12 16 20 24
"""
import argparse
import sys
from fractions import Fraction

import mpmath

from zetaforms.hyperforms import growth_diagnostics
from zetaforms.report import to_csv
from zetaforms.saddle import SaddleParams, eval_f, locate_mu1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=int, default=9)
    ap.add_argument("--b", type=int, default=1)
    ap.add_argument("--r", default="1")
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 12, 16, 20, 24])
    ap.add_argument("--prec-bits", type=int, default=128)
    args = ap.parse_args()
    r = Fraction(args.r)
    params = SaddleParams(args.a, args.b, r)
    with mpmath.mp.workprec(args.prec_bits):
        re_f = mpmath.re(eval_f(locate_mu1(params, args.prec_bits), params, args.prec_bits, upper=True))
    rows = []
    for row in growth_diagnostics(args.a, args.b, r, args.n, args.prec_bits):
        dev = abs(row.log_rate - re_f) / abs(re_f)
        rows.append([row.n, mpmath.nstr(row.coef_root, 12), mpmath.nstr(row.bound, 12), row.within_bound,
                     mpmath.nstr(row.log_rate, 12), mpmath.nstr(re_f, 12), mpmath.nstr(dev, 6)])
    sys.stdout.write(to_csv(["n", "coef_root", "coef_bound", "within_bound", "log_rate", "re_f_mu1", "rel_deviation"], rows))


if __name__ == "__main__":
    main()
