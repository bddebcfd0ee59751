"""
Entrypoint for the `skeinlab` command.

Subcommands:
- `skeinlab verify`: runs the selected suites and emits a report. Exit status
  0 when nothing failed (flagged checks do not fail a run), 1 when a check
  failed, 2 on a configuration or manifest error.
- `skeinlab list`: prints `check_id<TAB>anchor` for every registered check.

Flags override the `SKEINLAB_*` environment configuration for one run.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from skeinlab_core.config import SkeinlabConfig, get_config, parse_n_values
from skeinlab_core.errors import SkeinlabError

from .logger import configure, log_event
from .models import SUITES, RunConfig, parse_suites
from .registry import build_registry
from .report import emit_report
from .runner import run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _suite_list(text: str) -> tuple[str, ...]:
    try:
        return parse_suites(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _n_list(text: str) -> tuple[int, ...]:
    try:
        return parse_n_values(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="skeinlab",
        description="Verify the algebra behind the skein module computations.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run verification suites")
    verify.add_argument(
        "--suite",
        dest="suites",
        type=_suite_list,
        help=f"comma list of suites (default: all of {','.join(SUITES)})",
    )
    verify.add_argument("--kmax", type=int, help="largest |k| in family identity grids")
    verify.add_argument("--nmax", type=int, help="largest n in family identity grids")
    verify.add_argument(
        "--n", dest="n_values", type=_n_list, help="comma list of odd n for character checks"
    )
    verify.add_argument("--mode", choices=("exact", "float"), help="cyclotomic arithmetic")
    verify.add_argument("--precision", type=int, help="float precision in bits")
    verify.add_argument("--report", choices=("json", "text"), default="text")
    verify.add_argument("--out", type=Path, help="write the report here instead of stdout")
    verify.add_argument("--trace", dest="trace_path", type=Path, help="derivation trace file")
    verify.add_argument("--jobs", type=int, help="checks evaluated in parallel")

    listing = commands.add_parser("list", help="list registered checks")
    listing.add_argument("--suite", dest="suites", type=_suite_list)
    return parser.parse_args(argv)


def _run_config(args: argparse.Namespace, settings: SkeinlabConfig) -> RunConfig:
    return RunConfig.from_settings(
        settings,
        suites=args.suites,
        kmax=getattr(args, "kmax", None),
        nmax=getattr(args, "nmax", None),
        n_values=getattr(args, "n_values", None),
        mode=getattr(args, "mode", None),
        precision=getattr(args, "precision", None),
        jobs=getattr(args, "jobs", None),
        trace_path=getattr(args, "trace_path", None),
    )


def _list(config: RunConfig) -> int:
    registry = build_registry(config)
    for check_id, anchor in registry.list_checks():
        print(f"{check_id}\t{anchor}")
    return EXIT_OK


def _verify(config: RunConfig, args: argparse.Namespace) -> int:
    report = run_suite(config)
    emit_report(report, args.report, args.out)
    return EXIT_FAILED if report.failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parse_args(argv)
    try:
        settings = get_config()
        configure(settings.log_level, settings.environment)
        log_event("INFO", "configuration_loaded", **settings.log_summary())
        logging.basicConfig(level=settings.log_level, stream=sys.stderr)
        config = _run_config(args, settings)
    except ValueError as exc:
        log_event("ERROR", "invalid_configuration", error=str(exc))
        return EXIT_CONFIG

    try:
        if args.command == "list":
            return _list(config)
        return _verify(config, args)
    except SkeinlabError as exc:
        log_event("ERROR", "run_aborted", **exc.as_details())
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
