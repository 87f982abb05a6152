#!/usr/bin/env python3
"""Numerical asymptotics at roots of unity, end to end:

  1. periodicity of f_n(zeta_n) for the figure-eight knot,
  2. Richardson-accelerated exponential growth rate of f_n(zeta_{2n})
     against the hyperbolic volume,
  3. perturbative coefficients c_0..c_depth extracted from the normalized
     growth sequence,
  4. integrality of the formal quotient series,

optionally followed by a CSV dump of the raw evaluations for plotting.

Usage:
    python scripts/run_asymptotics.py [--knot K] [--n-max N] [--bits B]
                                      [--depth D] [--csv FILE]
"""

import argparse
import sys

from qhabiro import (
    extract_phi,
    emit_csv,
    growth_rate,
    periodicity_check,
    phi_quotient_check,
    vol_41,
)


def run() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--knot", default="4_1")
    ap.add_argument("--n-max", type=int, default=200)
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--csv", default=None, help="write raw evaluations here")
    args = ap.parse_args()

    rep = periodicity_check(args.knot, min(args.n_max, 100), bits=args.bits)
    print("periodicity: period=%s values=%s" % (rep.period, list(rep.values)))

    n_list = list(range(max(10, args.n_max // 4), args.n_max + 1,
                        max(1, args.n_max // 10)))
    growth = growth_rate(args.knot, n_list, bits=args.bits)
    print("growth rate: %.10f (flagged=%s)" % (growth.estimate, growth.flagged))
    if args.knot == "4_1":
        print("volume:      %.10f" % float(vol_41(args.bits)))

    phi = extract_phi(args.knot, args.depth, args.n_max,
                      bits=max(args.bits, 512))
    print("phi coefficients:", [float(c) for c in phi.coeffs])

    print("quotient integrality:", phi_quotient_check(3))

    if args.csv:
        with open(args.csv, "w") as fh:
            emit_csv(fh, args.knot, args.n_max, bits=args.bits)
        print("wrote", args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(run())
