"""Run every rate config in ``configs/`` and print a summary table.

Usage: python scripts/run_rates.py [--out DIR] [--format csv|json|plotdata] [CONFIG ...]
"""

import argparse
import sys
import time
from pathlib import Path

from ratelab.harness import ExperimentConfig, emit_report, run_rate_experiment

HERE = Path(__file__).resolve().parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="*", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--format", choices=("csv", "json", "plotdata"), default="csv")
    args = ap.parse_args(argv)
    paths = args.configs or sorted((HERE / "configs").glob("*.cfg"))
    ok = True
    print(f"{'config':<12} {'theorem':<9} {'slope':>8} {'theory':>8} {'stab':>7}  result  time")
    for path in paths:
        config = ExperimentConfig.from_file(path)
        t0 = time.perf_counter()
        report = run_rate_experiment(config)
        emit_report(report, args.format, args.out, stem=config.output)
        dt = time.perf_counter() - t0
        slope = f"{report.slope:8.4f}" if report.slope_defined else "     n/a"
        theory = f"{report.theory_slope:8.4f}" if report.slope_defined else "     n/a"
        print(f"{path.stem:<12} {config.theorem:<9} {slope} {theory} {report.stability:7.4f}  "
              f"{'PASS' if report.passed else 'FAIL':<6}  {dt:.1f}s")
        ok = ok and report.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
