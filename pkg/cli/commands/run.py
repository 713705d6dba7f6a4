"""
``run``: every configured algorithm on every configured scenario.
"""

from pathlib import Path
from typing import List, Optional
import argparse
import logging
import sys

from cli import EXIT_INVALID_CONFIG, EXIT_OK, EXIT_RUNTIME_FAILURE
from cli.schemas import RunConfig, load_run_config
from config import get_settings
from core.errors import ConfigError, GrowingExpertsError, InvalidInputError
from core.harness.engine import ExperimentEngine
from core.harness.report import RegretReport, dumps
from core.harness.scenarios import Scenario, generate_scenario

logger = logging.getLogger(__name__)


def build_scenarios(config: RunConfig, seed: Optional[int] = None) -> List[Scenario]:
    """Scenarios of a run; ``seed`` (or ``config.seed``) replaces every scenario seed."""
    seed = seed if seed is not None else config.seed
    specs = config.scenarios if seed is None else [s.model_copy(update={"seed": seed}) for s in config.scenarios]
    return [generate_scenario(spec) for spec in specs]


def execute_run(config: RunConfig, seed: Optional[int] = None) -> List[RegretReport]:
    """
    Run a validated configuration.

    Raises:
        InvalidInputError: a scenario or algorithm cannot be built from the configuration
        ExperimentError: an experiment failed at runtime
    """
    scenarios = build_scenarios(config, seed)
    algorithms = [spec.build() for spec in config.algorithms]
    comparators = [spec.build() for spec in config.comparators]
    engine = ExperimentEngine()
    return engine.run_suite(scenarios, algorithms, comparators, get_settings().max_workers)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.config)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_INVALID_CONFIG

    out_dir = Path(args.out_dir or config.out_dir or get_settings().out_dir)
    try:
        reports = execute_run(config, args.seed)
    except InvalidInputError as e:
        logger.error(f"Invalid run configuration: {e}")
        return EXIT_INVALID_CONFIG
    except GrowingExpertsError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_RUNTIME_FAILURE

    try:
        for report in reports:
            paths = report.write(out_dir)
            logger.info(f"{report.scenario}/{report.algorithm}: regret {report.final_regret:.6g}, "
                        f"trace {paths['trace']}")
    except OSError as e:
        logger.error(f"Cannot write results to {out_dir}: {e}")
        return EXIT_RUNTIME_FAILURE

    if args.stdout:
        sys.stdout.write(dumps([
            {"scenario": r.scenario, "algorithm": r.algorithm, "summary": r.summary(), "flags": r.flags}
            for r in reports
        ]))
    return EXIT_OK
