"""
Subcommand handlers. Each takes the parsed arguments and returns an exit code.
"""

from cli.commands.presets import cmd_list_presets
from cli.commands.run import cmd_run
from cli.commands.verify import cmd_verify

__all__ = ["cmd_list_presets", "cmd_run", "cmd_verify"]
