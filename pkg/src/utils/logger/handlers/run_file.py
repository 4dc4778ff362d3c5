"""Handler writing every record of a command run to rotating files."""

from typing import List

from utils.logger.config import LogEvent
from utils.logger.handlers.base import BaseLogHandler, Rotation, RotatingFileTarget


class RunRotatingFileHandler(BaseLogHandler):
    """Append buffered events to ``<base_dir>/<prefix>/<window>.log``.

    With ``as_json`` each record becomes one JSON object ``{"level", "text"}``
    and the file suffix is ``.jsonl``.
    """

    def __init__(
        self,
        base_dir: str,
        filename_prefix: str = "",
        create: bool = True,
        rotation: Rotation = "daily",
        as_json: bool = False,
    ) -> None:
        super().__init__()
        self.target = RotatingFileTarget(base_dir, filename_prefix, rotation, create)
        self.as_json = as_json

    @property
    def suffix(self) -> str:
        return ".jsonl" if self.as_json else ".log"

    async def push(self, records: List[LogEvent]) -> None:
        if not records:
            return
        if self.as_json:
            lines = [self.json_encode({"level": ev.level.name, "text": ev.text}).decode() for ev in records]
        else:
            lines = [ev.text for ev in records]
        self.target.append(self.suffix, lines)
