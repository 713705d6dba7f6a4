"""
``verify``: the seeded property suites.
"""

import argparse
import logging
import sys

from cli import EXIT_OK, EXIT_RUNTIME_FAILURE, EXIT_VIOLATION
from config import get_settings
from core.errors import GrowingExpertsError
from core.harness.report import dumps
from core.verification import run_suites

logger = logging.getLogger(__name__)


def cmd_verify(args: argparse.Namespace) -> int:
    seeds = args.seeds or get_settings().default_seeds
    try:
        results = run_suites(args.suite, seeds, args.seed)
    except GrowingExpertsError as e:
        logger.error(f"Verification aborted: {e}")
        return EXIT_RUNTIME_FAILURE

    for result in results:
        for check in result.checks:
            status = "ok" if check.passed else f"FAILED seeds={check.violations}"
            print(f"{result.suite:<12} {check.name:<40} runs={check.runs:<5} "
                  f"worst_slack={check.worst_slack:+.3e} {status}", file=sys.stderr)

    if args.stdout:
        sys.stdout.write(dumps([r.to_dict() for r in results]))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION
