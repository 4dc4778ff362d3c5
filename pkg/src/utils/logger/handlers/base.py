"""Base class and shared file rotation for log handlers."""

from abc import ABC, abstractmethod
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Literal

import msgspec

from utils.logger.config import LogEvent, LoggerConfig

Rotation = Literal["daily", "hourly", "per_minute", "per_second"]

ROTATION_PATTERNS = {
    "daily": "%Y-%m-%d",
    "hourly": "%Y%m%d_%H0000",
    "per_minute": "%Y%m%d_%H%M00",
    "per_second": "%Y%m%d_%H%M%S",
}


class BaseLogHandler(ABC):
    """Abstract handler receiving batches of formatted log events."""

    def __init__(self):
        self._json_encode = None
        self._primary_config = None

    @property
    def json_encode(self):
        """Lazily instantiate and return the JSON encoder."""
        if self._json_encode is None:
            self._json_encode = msgspec.json.Encoder().encode
        return self._json_encode

    @property
    def primary_config(self):
        return self._primary_config

    def add_primary_config(self, config: LoggerConfig):
        """Attach the originating logger configuration to the handler."""
        self._primary_config = config

    @abstractmethod
    async def push(self, records: List[LogEvent]) -> None:
        """Flush a batch of log records to the handler destination.

        :param records: List of buffered log events.
        """


class RotatingFileTarget:
    """Resolves ``<base_dir>/<prefix>/<window><suffix>`` for the current UTC rotation window."""

    def __init__(self, base_dir, filename_prefix: str = "", rotation: Rotation = "daily", create: bool = True):
        if rotation not in ROTATION_PATTERNS:
            raise ValueError(f"Invalid rotation {rotation!r}; expected one of {', '.join(ROTATION_PATTERNS)}")
        self.base_dir = Path(base_dir)
        self.filename_prefix = filename_prefix
        self._pattern = ROTATION_PATTERNS[rotation]
        if create:
            self.base_dir.mkdir(parents=True, exist_ok=True)

    def path(self, suffix: str) -> Path:
        name = datetime.now(timezone.utc).strftime(self._pattern) + suffix
        directory = self.base_dir / self.filename_prefix if self.filename_prefix else self.base_dir
        return directory / name

    def append(self, suffix: str, lines: List[str]) -> None:
        target = self.path(suffix)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("a", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
