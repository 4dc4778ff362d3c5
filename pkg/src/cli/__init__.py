from cli.parser import build_parser, command_kwargs
from cli.runner import resolve_command, run_command

__all__ = ["build_parser", "command_kwargs", "resolve_command", "run_command"]
