"""
Entry point: ``python -m cli.main {run,verify,list-presets}``.
"""

from typing import List, Optional
import argparse
import logging
import sys

from cli.commands import cmd_list_presets, cmd_run, cmd_verify
from config import get_settings
from core.verification import SUITE_NAMES

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growexp",
        description="Aggregation of growing sets of experts: experiments and regret verification",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run every algorithm on every scenario of a config file")
    run.add_argument("--config", required=True, help="Run configuration (JSON or TOML)")
    run.add_argument("--out-dir", default=None, help="Output directory for traces and reports")
    run.add_argument("--seed", type=int, default=None, help="Override every scenario seed")
    run.add_argument("--stdout", action="store_true", help="Also print run summaries as JSON")
    run.set_defaults(handler=cmd_run)

    verify = subparsers.add_parser("verify", help="Run the seeded property suites")
    verify.add_argument("suite", choices=list(SUITE_NAMES) + ["all"], help="Suite to run")
    verify.add_argument("--seeds", type=int, default=None, help="Seeds per check")
    verify.add_argument("--seed", type=int, default=None, help="First seed")
    verify.add_argument("--stdout", action="store_true", help="Print suite results as JSON")
    verify.set_defaults(handler=cmd_verify)

    presets = subparsers.add_parser("list-presets", help="List algorithm and prior presets")
    presets.add_argument("--stdout", action="store_true", help="Print the catalogue as JSON")
    presets.set_defaults(handler=cmd_list_presets)
    return parser


def configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(get_settings().log_level)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
