"""Line-delimited JSON metrics: one object per record, appended and flushed per line."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Union

import msgspec

from utils.model_parser import model_parser


class MetricsWriter:
    """Append dataclass records (or plain mappings) to a JSONL file.

    NaN and infinite floats are written as ``null``.
    """

    def __init__(self, path: Union[str, Path], append: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not append:
            self.path.write_bytes(b"")
        self._encode = msgspec.json.Encoder().encode

    def write(self, record: Any) -> None:
        row = record if isinstance(record, dict) else model_parser(record)
        with self.path.open("ab") as f:
            f.write(self._encode(row) + b"\n")


def metrics_write(records: Iterable[Any], path: Union[str, Path]) -> Path:
    """Write ``records`` to ``path`` as JSON lines, replacing any existing file."""

    writer = MetricsWriter(path)
    for record in records:
        writer.write(record)
    return writer.path


def read_metrics(path: Union[str, Path]) -> list[dict[str, Any]]:
    return [msgspec.json.decode(line) for line in Path(path).read_bytes().splitlines() if line.strip()]
