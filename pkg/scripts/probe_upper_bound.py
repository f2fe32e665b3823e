"""Check that Gaussians scaled into the class stay below the theoretical order.

Usage: python scripts/probe_upper_bound.py CONFIG [--width W ...]
"""

import argparse
import sys

from ratelab.harness import ExperimentConfig, upper_bound_probe


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--width", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    args = ap.parse_args(argv)
    config = ExperimentConfig.from_file(args.config)
    ok = True
    for w in args.width:
        for row in upper_bound_probe(config, w):
            print(f"width {w:<4g} n={row['n']}  error {row['error']:.3e}  bound {row['bound']:.3e}"
                  f"  {'ok' if row['passed'] else 'EXCEEDED'}")
            ok = ok and row["passed"]
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
