"""Command line: ``suite run``, ``suite explain <id>``, ``suite list``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import CHECKS, SUITES, explain
from .config import ConfigError, load_config
from .report import compare_bodies
from .runner import WORKERS_ENV, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="suite", description="Numerical verification suites for "
                                "q-oscillator L-operators and Baxter Q-operators.")
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run suites and write a JSON report",
                       epilog=f"Set {WORKERS_ENV}=<n> to run cases on n processes.")
    r.add_argument("-c", "--config", help="YAML config file")
    r.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (tol.<check>=<value> for tolerances)")
    r.add_argument("--suites", help="comma-separated suite list (default: all)")
    r.add_argument("--profile", help="M,N")
    r.add_argument("--seed", type=int)
    r.add_argument("--skip-unsupported", action="store_true",
                   help="skip unsupported index sets instead of failing")
    r.add_argument("-o", "--output", "--json", help="report path (default: stdout)")
    r.add_argument("--golden", help="golden report to compare against; any difference fails")
    r.add_argument("--no-timing", action="store_true", help="omit wall times from the report")
    e = sub.add_parser("explain", help="describe a check")
    e.add_argument("check_id")
    sub.add_parser("list", help="list suites and checks")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "list":
        for s in SUITES:
            ids = ", ".join(c.check_id for c in CHECKS.values() if c.suite == s)
            print(f"{s:18s} {ids}")
        return EXIT_OK
    if args.cmd == "explain":
        try:
            print(explain(args.check_id), end="")
        except KeyError as err:
            print(f"error: {err.args[0]}", file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK
    overrides = list(args.set)
    if args.suites:
        overrides.append(f"suites={args.suites}")
    if args.profile:
        overrides.append(f"profile={args.profile}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.skip_unsupported:
        overrides.append("skip_unsupported=true")
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    golden = None
    if args.golden:
        try:
            golden = json.loads(Path(args.golden).read_text())
        except (OSError, ValueError) as err:
            print(f"cannot read golden report: {err}", file=sys.stderr)
            return EXIT_USAGE
    report = run_suite(cfg)
    text = report.to_json(timing=not args.no_timing)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    for suite, c in report.summary().items():
        print(f"{suite:18s} pass {c['pass']:4d}  fail {c['fail']:4d}", file=sys.stderr)
    for e in report.errors:
        print(f"error: {e}", file=sys.stderr)
    ok = report.passed
    if golden is not None:
        diffs = compare_bodies(golden, report.body())
        for d in diffs:
            print(f"golden: {d}", file=sys.stderr)
        ok = ok and not diffs
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
