"""Tabulate ||f_{n+1}||_p and ||F_n||_p against 2^{nd(1-1/p)}.

Usage: python scripts/norm_scan.py [--d 1|2] [--csv DIR]
"""

import argparse
import math
import sys
from pathlib import Path

from ratelab.extremal import extremal_norm_scan

CASES = (("f-next", (math.inf, 1.0, 2.0, 4.0)), ("Fn-dirichlet", (2.0, math.inf)))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=1, choices=(1, 2))
    ap.add_argument("--csv", type=Path, default=None, help="write one CSV per scan into DIR")
    args = ap.parse_args(argv)
    ok = True
    for fam, ps in CASES:
        for p in ps:
            tb = extremal_norm_scan(fam, p=p, d=args.d)
            ratios = " ".join(f"{r:.4f}" for r in tb.ratios)
            print(f"{fam:<13} p={p:<4g} ratios [{ratios}]  stability {tb.stability:.4f}"
                  f"  {'PASS' if tb.passed else 'FAIL'}")
            if args.csv is not None:
                args.csv.mkdir(parents=True, exist_ok=True)
                tb.write_csv(args.csv / f"{fam}_p{p:g}_d{args.d}.csv")
            ok = ok and tb.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
