"""Command-line interface.

Subcommands: band, phase-sweep, regime-map, simulate, mass-sim,
ref-shift-check.  The table goes to --out when given (relative paths are
resolved against $FRAGILEBAND_OUT_DIR when set), otherwise to stdout;
diagnostics go to stderr unless --quiet.

Exit codes: 0 success, 1 validation or parse error, 2 numerical
non-convergence, 3 property-check failure (a ref-shift row with holds=false).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .game import CurveError
from .mass import NoFixedPointFound
from .reference import HypothesisViolation
from .scenario import (
    COMMANDS,
    ParseError,
    ResultTable,
    Scenario,
    TOOL_VERSION,
    ValidationError,
    load_scenario,
    with_seed,
)
from .stopping import InvalidProcess, NonConvergence

OUT_DIR_ENV = "FRAGILEBAND_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fragileband",
        description="Fragile-band phase analysis, stop/continue regimes, and intervention dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"fragileband {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "band": "fragile-band thresholds and existence criterion",
        "phase-sweep": "phase labels and oracle equilibria along a w sweep",
        "regime-map": "stop/continue regime diagnostics over a parameter grid",
        "simulate": "seeded trajectory of the stop/continue problem",
        "mass-sim": "perturbed fixed-point trajectory of the mass dynamics",
        "ref-shift-check": "reference-shift stability bound verification",
    }
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=helps[name])
        cmd.add_argument("--scenario", required=True, help="path to a scenario JSON file")
        cmd.add_argument("--out", default=None, help="output file (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default=None)
        cmd.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        cmd.add_argument("--quiet", action="store_true", help="suppress stderr diagnostics")
    return parser


def _resolve_out(out: str | None, scenario: Scenario) -> Path | None:
    target = out if out is not None else scenario.output.path
    if target is None:
        return None
    path = Path(target)
    env_dir = os.environ.get(OUT_DIR_ENV)
    if env_dir and not path.is_absolute():
        path = Path(env_dir) / path
    return path


def _emit(table: ResultTable, path: Path | None, fmt: str, quiet: bool) -> None:
    text = table.to_json() if fmt == "json" else table.to_csv()
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    if not quiet:
        print(f"wrote {len(table.rows)} rows to {path}", file=sys.stderr)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    quiet = args.quiet
    try:
        scenario = load_scenario(args.scenario)
    except (ParseError, ValidationError) as exc:
        if not quiet:
            print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        scenario = with_seed(scenario, args.seed)
    try:
        table = COMMANDS[args.command](scenario)
    except (ValidationError, HypothesisViolation, InvalidProcess, CurveError) as exc:
        if not quiet:
            print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NonConvergence, NoFixedPointFound) as exc:
        if not quiet:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or scenario.output.format
    _emit(table, _resolve_out(args.out, scenario), fmt, quiet)
    if args.command == "ref-shift-check":
        holds_index = table.columns.index("holds")
        if any(not row[holds_index] for row in table.rows):
            if not quiet:
                print("error: reference-shift bound violated", file=sys.stderr)
            return 3
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
