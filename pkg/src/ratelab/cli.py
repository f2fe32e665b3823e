"""Command line: ``ratelab check | rates | kernel-dump``.

Exit codes: 0 pass, 1 check failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .field import GridSpec, export_csv, save_binary
from .harness import ExperimentConfig, emit_report, run_property_suite, run_rate_experiment
from .kernels import FAMILIES, KernelId, sample_kernel
from .omega import DomainError, UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ratelab", description="de la Vallee Poussin approximation lab")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run the property suites")
    c.add_argument("--suite", nargs="*", default=[], metavar="NAME")

    r = sub.add_parser("rates", help="run a rate experiment")
    r.add_argument("--config", required=True)
    r.add_argument("--format", choices=("csv", "json", "plotdata"), default="csv")
    r.add_argument("--out", required=True, metavar="DIR")

    k = sub.add_parser("kernel-dump", help="sample a kernel to a file")
    k.add_argument("--family", required=True, choices=FAMILIES)
    k.add_argument("--param", required=True, type=int)
    k.add_argument("--d", type=int, default=1)
    k.add_argument("--period-exponent", type=int, default=4)
    k.add_argument("--out", required=True, metavar="FILE")
    return ap


def _check(args) -> int:
    summary = run_property_suite(args.suite)
    for line in summary.lines():
        print(line)
    return EXIT_OK if summary.passed else EXIT_FAIL


def _rates(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = run_rate_experiment(config)
    path = emit_report(report, args.format, args.out, stem=config.output)
    slope = "n/a" if report.slope is None else f"{report.slope:.4f}"
    theory = "n/a" if report.theory_slope is None else f"{report.theory_slope:.4f}"
    print(f"{config.theorem}: slope {slope} (theory {theory}), stability {report.stability:.4f}"
          f" -> {'PASS' if report.passed else 'FAIL'}; wrote {path}")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _kernel_dump(args) -> int:
    kid = KernelId(args.family, args.param, args.d)
    grid = GridSpec.dyadic(args.d, kid.spectral_radius(), args.period_exponent)
    f = sample_kernel(kid, grid)
    out = Path(args.out)
    if out.suffix == ".bin":
        save_binary(f, out)
    else:
        export_csv(f, out)
    print(f"wrote {out} ({grid.N}^{grid.d} nodes, L={grid.L:.6g})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"check": _check, "rates": _rates, "kernel-dump": _kernel_dump}[args.command]
    try:
        return handler(args)
    except (UsageError, DomainError) as exc:
        print(f"ratelab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ratelab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
