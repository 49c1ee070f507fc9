#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line entry point for the modal-histories toolkit.

Each subcommand reads one scenario file, validates it, runs the matching
computation and writes a deterministic result document (JSON or CSV) to
stdout or to --out. Logs go to stderr and to log/<timestamp>_<name>.log.

Designed to be run via: bash main.sh <subcommand> <scenario> [options]
"""
from __future__ import annotations

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path

from dotenv import load_dotenv

# .env is optional here; MODAL_MAX_DIM is the only variable read
env_file = Path(__file__).parent / ".env"
if env_file.exists():
    load_dotenv(env_file, override=False)

from shared.config import NumericPolicy  # noqa: E402
from shared.errors import (  # noqa: E402
    CapacityError,
    CausalityError,
    DisjointnessError,
    HistoryError,
    OutputError,
    ReinterferenceError,
    ScenarioError,
    ScenarioSchemaError,
    ShapeError,
    ValidationError,
)
from shared.log_setup import setup_logging  # noqa: E402

log = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    UNEXPECTED = 1
    SCHEMA = 2
    VALIDATION = 3
    CAPACITY = 4
    REFUSAL = 5
    OUTPUT = 6


_EXIT_FOR: tuple[tuple[type[BaseException] | tuple[type[BaseException], ...], ExitCode], ...] = (
    (ScenarioSchemaError, ExitCode.SCHEMA),
    ((ValidationError, ShapeError, ScenarioError, DisjointnessError, CausalityError, HistoryError), ExitCode.VALIDATION),
    (CapacityError, ExitCode.CAPACITY),
    (ReinterferenceError, ExitCode.REFUSAL),
    (OutputError, ExitCode.OUTPUT),
)

# subcommand → scenario kind it accepts (None: any)
SUBCOMMANDS: dict[str, str | None] = {
    "decompose": "decompose",
    "single-time": "single_time",
    "histories": "histories",
    "branch": "branch",
    "lattice": "lattice",
    "run": None,
}


def exit_code_for(exc: BaseException) -> ExitCode:
    for types, code in _EXIT_FOR:
        if isinstance(exc, types):
            return code
    return ExitCode.UNEXPECTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalhistories",
        description="Modal property assignment, consistent histories and causal-lattice checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(
            name,
            help=f"run a '{kind}' scenario" if kind else "run any scenario, dispatching on its kind",
        )
        p.add_argument("scenario", type=Path, help="Path to the scenario JSON file")
        p.add_argument(
            "--tol", type=float, default=None,
            help="Consistency tolerance (overrides the scenario's own 'tolerance'; default 1e-10)",
        )
        p.add_argument("--format", choices=("json", "csv"), default="json", help="Output format (default: json)")
        p.add_argument("--out", type=Path, default=None, help="Write the result here instead of stdout")
        p.add_argument("--parallel", action="store_true", help="Evaluate independent branches/foliations in a thread pool")
        p.add_argument("--workers", type=int, default=None, help="Thread pool size when --parallel is set")
        p.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level on stderr")
    return parser


def _main(args: argparse.Namespace) -> ExitCode:
    from ScenarioRunner import effective_policy, emit, load_scenario, run_scenario

    log.info("=" * 70)
    log.info("modalhistories %s %s", args.command, args.scenario)
    log.info("=" * 70)

    scenario = load_scenario(args.scenario)
    expected = SUBCOMMANDS[args.command]
    if expected is not None and scenario.kind != expected:
        raise ScenarioSchemaError(
            [f"kind: subcommand '{args.command}' expects '{expected}', file declares '{scenario.kind}'"]
        )

    policy = effective_policy(scenario, NumericPolicy.from_args(args), args.tol)
    log.debug("Numeric policy: %s", policy)
    doc = run_scenario(scenario, policy)
    emit(doc, args.format, args.out)

    log.info("=" * 70)
    log.info("  Scenario   : %s (%s)", doc["scenario"], doc["kind"])
    log.info("  Tolerance  : %.1e", doc["tolerance"])
    log.info("  Table rows : %d", len(doc["table"]))
    log.info("=" * 70)
    return ExitCode.OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(name=args.command, level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return int(_main(args))
    except ReinterferenceError as exc:
        log.error("Refused: %s", exc)
        for a, b, _ov in exc.report.get("offending_pairs", [])[:10]:
            log.error("  overlapping records: %s vs %s", a, b)
        return int(ExitCode.REFUSAL)
    except ScenarioSchemaError as exc:
        for problem in exc.problems:
            log.error("Schema: %s", problem)
        return int(ExitCode.SCHEMA)
    except Exception as exc:
        code = exit_code_for(exc)
        if code is ExitCode.UNEXPECTED:
            log.critical("Unexpected error: %s", exc, exc_info=True)
        else:
            log.error("%s: %s", type(exc).__name__, exc)
        return int(code)


if __name__ == "__main__":
    sys.exit(main())
