"""Command line front end.

``rnsl run scenario.json`` executes the scenario's suites and writes the
report directory; ``rnsl plot report.json --kind ... --out ...`` extracts
plot-ready CSV columns from an existing report.  Exit codes: 0 all suites
passed, 1 at least one suite failed, 2 configuration or schema problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import RnslError
from .scenario import load_scenario
from .suites import PLOT_KINDS, emit_plot_data, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnsl",
        description="Scenario-driven checks for transform and semigroup claims.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario's suites and write reports")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    run_p.add_argument("--out", default=None, help="output directory for reports")
    run_p.add_argument(
        "--suite",
        action="append",
        default=None,
        metavar="NAME",
        help="run only this suite (repeatable)",
    )
    run_p.add_argument(
        "--seed", type=int, default=None, help="override the scenario seed"
    )

    plot_p = sub.add_parser("plot", help="extract plot data from a report")
    plot_p.add_argument("report", help="path to a report.json")
    plot_p.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot_p.add_argument("--out", required=True, help="output CSV path")
    return parser


def _cmd_run(args) -> int:
    scn = load_scenario(args.scenario)
    payload, passed, target = run_scenario(
        scn, out_dir=args.out, suites=args.suite, seed=args.seed
    )
    for suite in payload["suites"]:
        verdict = "PASS" if suite["passed"] else "FAIL"
        print(f"{suite['suite']}: {verdict} ({len(suite['records'])} checks)")
    print(f"report: {os.path.join(target, 'report.json')}")
    print(f"result: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def _cmd_plot(args) -> int:
    with open(args.report, "r", encoding="utf-8") as handle:
        report = json.load(handle)
    emit_plot_data(report, args.kind, args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_plot(args)
    except (RnslError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
