#!/usr/bin/env python3
"""Weyl-constant scan for a staircase-coupled interval problem.

Tabulates n/sqrt(lambda_n) * pi/(b-a) over an index range.  At a finite
refinement level the couplings shift the counting function by up to about
one half per atom, so low windows sit visibly above 1; the constant is
recovered once n dominates the atom count.

    python scripts/weyl_law.py --level 5 --indices 50..100 --step 5
    python scripts/weyl_law.py --level 5 --indices 1500..2000 --step 100
"""
import argparse
import math
import sys

from deltaprime import CantorSpec, ProblemSpec, SingularMeasure
from deltaprime.io import render_csv
from deltaprime.spectrum import _eigenvalue_by_index


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", type=int, default=5)
    ap.add_argument("--indices", default="50..100")
    ap.add_argument("--step", type=int, default=5)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    lo, hi = (int(v) for v in args.indices.split(".."))

    measure = SingularMeasure(cantor_parts=(CantorSpec((0.0, 1.0),
                                                       args.mass),))
    problem = ProblemSpec((0.0, 1.0), measure=measure, level=args.level)
    rows = []
    for n in range(lo, hi + 1, args.step):
        lam = _eigenvalue_by_index(problem, n)
        rows.append((n, lam, n / math.sqrt(lam) * math.pi))
    text = render_csv(("n", "lambda_n", "weyl_ratio"), rows,
                      {"level": args.level, "mass": args.mass})
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
