"""``paxkit`` entry point: parse arguments, run one subcommand, map errors to exit codes."""

import asyncio
import sys
from typing import Optional, Sequence

from cli.parser import build_parser, command_kwargs
from cli.runner import run_command
from utils.errors import PaxkitError
from utils.logger.config import LogLevel


def report_error(exc: Exception) -> int:
    print(f"paxkit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return getattr(exc, "exit_code", 1)


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the process exit code.

    0 on success, 1 for a domain error or an unreadable/unwritable path, 2 for a usage
    error (argparse included).
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        asyncio.run(
            run_command(
                args.command,
                command_kwargs(args),
                log_dir=args.log_dir,
                enable_stdout=args.log_stdout,
                as_json=args.log_json,
                level=LogLevel.parse(args.log_level),
            )
        )
    except (PaxkitError, OSError) as exc:
        return report_error(exc)
    return 0


if __name__ == "__main__":
    sys.exit(cli())
