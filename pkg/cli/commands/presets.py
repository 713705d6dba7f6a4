"""
``list-presets``: the algorithm and prior catalogues.
"""

import argparse

from cli import EXIT_OK
from config import ALGORITHM_PRESETS, PRIOR_PRESETS
from core.harness.report import dumps


def format_presets() -> str:
    width = max(len(name) for name in list(ALGORITHM_PRESETS) + list(PRIOR_PRESETS))
    lines = ["Algorithms:"]
    for name, preset in ALGORITHM_PRESETS.items():
        scope = "growing" if preset["growing"] else "fixed"
        lines.append(f"  {name:<{width}}  {preset['name']} [{scope}]: {preset['guarantee']}")
    lines.append("Priors:")
    for name, preset in PRIOR_PRESETS.items():
        lines.append(f"  {name:<{width}}  {preset['formula']}")
    return "\n".join(lines) + "\n"


def cmd_list_presets(args: argparse.Namespace) -> int:
    if args.stdout:
        print(dumps({"algorithms": ALGORITHM_PRESETS, "priors": PRIOR_PRESETS}), end="")
    else:
        print(format_presets(), end="")
    return EXIT_OK
