"""Factories for per-command loggers and exception logging."""

import traceback
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional, Union

from configs.env_config import Env
from utils.errors import PaxkitError
from utils.logger.config import LogLevel, LoggerConfig
from utils.logger.handlers.error_file import ErrorFileHandler
from utils.logger.handlers.run_file import RunRotatingFileHandler
from utils.logger.logger import Logger


class EnhancedLoggerFactory:
    """Convenience constructors for configured loggers."""

    @staticmethod
    def create_command_logger(
        command_id: str,
        log_dir: Union[str, Path, None] = None,
        level: LogLevel = LogLevel.INFO,
        enable_stdout: bool = False,
        as_json: bool = False,
    ) -> Logger:
        """Create a logger for one CLI command writing under ``<log_dir>/<command_id>/``.

        :param command_id: Subcommand name, used for the record name and subdirectory.
        :param log_dir: Base directory; ``PAXKIT_LOG_DIR`` or ``logs`` when omitted.
        :param level: Minimum log level recorded.
        :param enable_stdout: Whether to mirror output to stdout.
        :param as_json: Write the run log as JSON lines.
        """
        base_dir = str(log_dir or Env.log_dir())
        config = LoggerConfig(
            base_level=level,
            do_stdout=enable_stdout,
            str_format="%(asctime)s %(icon)s [%(levelname)s] %(name)s - %(message)s",
        )
        handlers = [
            RunRotatingFileHandler(base_dir=base_dir, filename_prefix=command_id, rotation="daily", as_json=as_json),
            ErrorFileHandler(base_dir=base_dir, filename_prefix=command_id, rotation="daily"),
        ]
        return Logger(config=config, name=command_id, handlers=handlers)

    @staticmethod
    @asynccontextmanager
    async def command_run_logger(
        command_id: str,
        log_dir: Union[str, Path, None] = None,
        level: LogLevel = LogLevel.INFO,
        enable_stdout: bool = False,
        as_json: bool = False,
    ):
        """Async context manager yielding a started command logger, shut down on exit.

        Arguments as for :meth:`create_command_logger`.
        """
        log = EnhancedLoggerFactory.create_command_logger(
            command_id, log_dir=log_dir, level=level, enable_stdout=enable_stdout, as_json=as_json
        )
        await log.start()
        try:
            yield log
        finally:
            await log.shutdown()


def log_exception(logger: Logger, exc: BaseException, context: str = "", with_traceback: Optional[bool] = None):
    """Log an exception, with traceback unless it is an expected domain error.

    :param logger: Logger used for reporting the failure.
    :param exc: Exception to log.
    :param context: Short description of where it happened.
    :param with_traceback: Force the traceback on or off; by default only
        unexpected (non-``PaxkitError``) exceptions carry one.
    """
    if with_traceback is None:
        with_traceback = not isinstance(exc, PaxkitError)
    error_msg = f"EXCEPTION in {context}: {type(exc).__name__}: {exc}"
    if with_traceback:
        error_msg += "\n" + "".join(traceback.format_exception(type(exc), exc, exc.__traceback__))
    logger.error(error_msg)
