#!/usr/bin/env python3

"""
main.py

Entry point for the omega_width command-line tool.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from rich.console import Console

from .algebra.structures import StructureError
from .atlas.core import AtlasError, PatternError
from .cli import EXIT_CAPABILITY, EXIT_FAILURE, EXIT_FORMAT, CLIHandler
from .config import ANALYSES, COMMANDS, LOG_LEVELS, MODES, ConfigError, load_config
from .engine.instance import InstanceError
from .engine.minimality import CapabilityError
from .engine.search import SearchError
from .logging_config import configure_logging, get_logger
from .mmsnp.obstructions import MMSNPError, ObstructionParseError
from .reduction.lifting import LiftError
from .reduction.pipeline import CompletenessError
from .report import ReportError
from .utils import FormatError

logger = get_logger(__name__)

# Typed failures and their exit codes, checked in order
ERROR_EXITS: tuple[tuple[type[Exception], int, str], ...] = (
    (CapabilityError, EXIT_CAPABILITY, "Capability bound"),
    (SearchError, EXIT_CAPABILITY, "Search cap"),
    (FormatError, EXIT_FORMAT, "Format error"),
    (ConfigError, EXIT_FORMAT, "Configuration error"),
    (ObstructionParseError, EXIT_FORMAT, "Parse error"),
    (AtlasError, EXIT_FORMAT, "Atlas error"),
    (PatternError, EXIT_FORMAT, "Pattern error"),
    (InstanceError, EXIT_FORMAT, "Instance error"),
    (LiftError, EXIT_FAILURE, "Lifting failed"),
    (CompletenessError, EXIT_FAILURE, "Completeness violated"),
    (MMSNPError, EXIT_FAILURE, "MMSNP error"),
    (StructureError, EXIT_FAILURE, "Structure error"),
    (ReportError, EXIT_FAILURE, "Report error"),
)


def create_parser() -> argparse.ArgumentParser:
    """
    Create and configure the command-line argument parser.

    Returns:
        Configured argparse.ArgumentParser instance.
    """
    parser = argparse.ArgumentParser(
        prog="omega_width",
        description="Ω Width - local consistency and bounded width over ω-categorical templates",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s gen --atlas equality --seed 42 --output inst.json
  %(prog)s minimize --atlas henson:3 --instance inst.json --k 2 --ell 3
  %(prog)s solve --atlas equality --instance inst.json --emit-witness w.json
  %(prog)s verify-witness --atlas equality --instance inst.json --witness w.json
  %(prog)s analyze-structure --structure k3.json --bounded-width --core
  %(prog)s analyze-mmsnp --obstructions two_coloring.txt --assert-normal-form
  %(prog)s repro --seed 42 --quick --output report.json

Exit codes:
  0 success/SAT, 10 UNSAT or trivial, 11 UNKNOWN,
  2 capability bound exceeded, 3 format/parse/config error, 1 other failure
        """,
    )
    parser.add_argument("command", choices=COMMANDS, help="Subcommand to run")
    parser.add_argument("--config", type=Path, help="JSON run configuration")

    # Logging arguments
    logging_group = parser.add_argument_group("logging options")
    logging_group.add_argument(
        "--verbose-logging", "-vl", action="store_true", help="Enable verbose logging"
    )
    logging_group.add_argument("--log-file", type=Path, help="Write logs to file")
    logging_group.add_argument("--log-level", choices=LOG_LEVELS, help="Set logging level")

    # Inputs and outputs
    io_group = parser.add_argument_group("inputs and outputs")
    io_group.add_argument("--atlas", help="Atlas family (e.g. henson:3, partition:1,inf) or file")
    io_group.add_argument("--instance", help="Instance file")
    io_group.add_argument("--structure", help="Finite structure file")
    io_group.add_argument("--obstructions", help="Obstruction-set text file")
    io_group.add_argument("--input-structure", help="Input structure for fpp-solve")
    io_group.add_argument("--witness", help="Witness file for verify-witness")
    io_group.add_argument("--output", "-o", help="Artifact or report output path")
    io_group.add_argument("--emit-witness", help="Where solve writes its witness")
    io_group.add_argument(
        "--certificate", help="Certificate written by analyze-structure, read by loop-harness"
    )

    # Levels and modes
    levels_group = parser.add_argument_group("levels and modes")
    levels_group.add_argument("--k", type=int, help="Projection level k'")
    levels_group.add_argument("--ell", "--l", dest="ell", type=int, help="Scope level ell'")
    levels_group.add_argument("--mode", choices=MODES, help="Parameter mode")
    levels_group.add_argument(
        "--unsafe",
        action="store_true",
        default=None,
        help="Allow levels beyond the capability bound",
    )
    levels_group.add_argument(
        "--certify",
        action="store_true",
        default=None,
        help="Search a certificate on the orbit structure before solving",
    )
    levels_group.add_argument("--route", choices=("lift", "coloring"), help="fpp-solve route")

    # Analyses
    analysis_group = parser.add_argument_group("structure analyses")
    for analysis in ANALYSES:
        analysis_group.add_argument(
            f"--{analysis}",
            dest="analyses",
            action="append_const",
            const=analysis,
            help=f"Run the {analysis} analysis",
        )
    analysis_group.add_argument(
        "--assert-normal-form",
        action="store_true",
        default=None,
        help="Treat the obstruction set as being in normal form",
    )

    # Generation, harness and caps
    run_group = parser.add_argument_group("generation and harness")
    run_group.add_argument("--seed", type=int, help="Seed of every random choice")
    run_group.add_argument("--trials", type=int, help="Harness trials")
    run_group.add_argument("--n-vars", type=int, help="Variables of generated instances")
    run_group.add_argument("--n-constraints", type=int, help="Constraints of generated instances")
    run_group.add_argument("--closure-cap", type=int, help="State cap of closures and searches")
    run_group.add_argument("--pattern-cap", type=int, help="Cap on materialized patterns")
    run_group.add_argument("--node-cap", type=int, help="Node cap of finite searches")
    run_group.add_argument(
        "--quick", action="store_true", default=None, help="Scale acceptance trial counts down"
    )

    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Configuration overrides given on the command line."""
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in ("config", "verbose_logging") and value is not None
    }
    for key in ("log_file",):
        if key in overrides:
            overrides[key] = str(overrides[key])
    if "analyses" in overrides:
        overrides["analyses"] = tuple(overrides["analyses"])
    return overrides


def report_error(console: Console, error: Exception) -> int:
    """Print a typed failure and return its exit code."""
    for error_type, code, title in ERROR_EXITS:
        if isinstance(error, error_type):
            console.print(f"❌ [red]{title}: {error}[/red]")
            logger.error("%s: %s", title, error)
            return code
    console.print(f"❌ [red]Unexpected error: {error}[/red]")
    logger.exception("Unexpected error")
    return EXIT_FAILURE


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the omega_width command-line tool."""
    parser = create_parser()
    args = parser.parse_args(argv)
    console = Console()

    try:
        config = load_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        return report_error(console, e)

    # -vl leaves the per-call search records out; --log-level DEBUG keeps them
    log_level = "DEBUG" if args.verbose_logging else config.log_level
    configure_logging(
        level=log_level,  # type: ignore[arg-type]
        log_file=Path(config.log_file) if config.log_file else None,
        quiet_modules=("engine.search",) if args.verbose_logging else (),
    )
    logger.info("omega_width starting: %s", config.command)

    try:
        return CLIHandler(console).run(config)
    except Exception as e:
        return report_error(console, e)


if __name__ == "__main__":
    sys.exit(main())
