"""Handler that isolates error-level logs into dedicated files."""

from typing import List

from utils.logger.config import LogEvent, LogLevel
from utils.logger.handlers.base import BaseLogHandler, Rotation, RotatingFileTarget


class ErrorFileHandler(BaseLogHandler):
    """Persist only ERROR and CRITICAL records to ``<window>.error.log``."""

    def __init__(
        self,
        base_dir: str,
        filename_prefix: str = "",
        create: bool = True,
        rotation: Rotation = "daily",
    ) -> None:
        super().__init__()
        self.target = RotatingFileTarget(base_dir, filename_prefix, rotation, create)

    async def push(self, records: List[LogEvent]) -> None:
        """Append only error-or-higher events to the error log file.

        :param records: Buffered log events awaiting persistence.
        """

        errors = [ev.text for ev in records if ev.level >= LogLevel.ERROR]
        if errors:
            self.target.append(".error.log", errors)
