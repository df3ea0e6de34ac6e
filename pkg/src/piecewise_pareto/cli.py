"""Command-line entry point.

Exit codes: 0 success, 2 usage or invalid parameters, 3 data error,
4 no family could be fitted.
"""
from __future__ import annotations

import argparse
import sys

from . import report
from .distributions import Family
from .errors import InvalidParams, NoValidFit, ParetoError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOFIT = 0, 2, 3, 4

FAMILIES = [f.value for f in Family]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="piecewise-pareto",
                                description="Fit, sample and tabulate piecewise Pareto distributions.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="maximum-likelihood fit of one or all families")
    f.add_argument("--input", required=True, help="data file, one value per line")
    f.add_argument("--family", default="all", choices=FAMILIES + ["all"])
    f.add_argument("--xmin", type=float, help="pin x_min instead of scanning")
    f.add_argument("--beta", type=float, help="pin beta of the pow, exp and alg families")
    f.add_argument("--output", help="JSON report path (default: stdout)")

    def dist_args(q):
        q.add_argument("--family", required=True, choices=FAMILIES)
        q.add_argument("--alpha", type=float, required=True)
        q.add_argument("--beta", type=float)
        q.add_argument("--xmin", type=float, required=True)

    s = sub.add_parser("sample", help="draw variates by inverse transform")
    dist_args(s)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--output", help="output path (default: stdout)")

    t = sub.add_parser("tabulate", help="pdf and cdf on a grid, as CSV")
    dist_args(t)
    t.add_argument("--xmax", type=float, required=True)
    t.add_argument("--points", type=int, default=200)
    t.add_argument("--spacing", choices=["log", "linear"], default="log")
    t.add_argument("--output")

    h = sub.add_parser("hist", help="log-binned empirical density, as CSV")
    h.add_argument("--input", required=True)
    h.add_argument("--bins-per-decade", type=int, default=10)
    h.add_argument("--output")

    sf = sub.add_parser("santafe", help="fit the thresholded-Gaussian contact model")
    sf.add_argument("--input", required=True, help="degree file, one integer per line")
    sf.add_argument("--N", type=int, required=True, help="system size")
    sf.add_argument("--output")
    return p


def run(args) -> int:
    if args.command == "fit":
        rep = report.cmd_fit(args.input, args.family, args.xmin, args.beta, args.output)
        if rep.best_family is None:
            for e in rep.entries:
                print(f"error: {e.family.value}: {e.error}", file=sys.stderr)
            return EXIT_NOFIT
    elif args.command == "sample":
        report.cmd_sample(args.family, args.alpha, args.beta, args.xmin, args.count, args.seed,
                          args.output)
    elif args.command == "tabulate":
        report.cmd_tabulate(args.family, args.alpha, args.beta, args.xmin, args.xmax, args.points,
                            args.spacing, args.output)
    elif args.command == "hist":
        report.cmd_hist(args.input, args.bins_per_decade, args.output)
    else:
        report.cmd_santafe(args.input, args.N, args.output)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except InvalidParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoValidFit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOFIT
    except (ParetoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
