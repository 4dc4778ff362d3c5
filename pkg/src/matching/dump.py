"""Detection dump in DOTA Task-1 submission style.

One detection per line: ``image_id class score x1 y1 x2 y2 x3 y3 x4 y4``.
Floats are written with ``repr`` so a dump reads back to the same values.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

from geometry.boxes import obb_to_quad, quad_to_obb
from model.geometry import Quad
from model.records import DetectionRecord
from utils.errors import NonNumericCoordinate, ParseError, TooFewTokens

N_TOKENS = 11


def format_detection(det: DetectionRecord) -> str:
    corners = " ".join(repr(v) for v in obb_to_quad(det.box).flat())
    return f"{det.image_id} {det.category} {det.score!r} {corners}"


def write_detections(path: Union[str, Path], detections: Iterable[DetectionRecord]) -> Path:
    """Write detections to ``path``, one line each, in the given order."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    lines = [format_detection(d) for d in detections]
    target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return target


def parse_detections(text: str) -> list[DetectionRecord]:
    """Parse dump text; blank lines are skipped.

    :raises TooFewTokens: If a line has fewer than 11 tokens.
    :raises NonNumericCoordinate: If the score or a coordinate is not a number.
    :raises ParseError: If a line has extra tokens or an invalid score.
    """

    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) < N_TOKENS:
            raise TooFewTokens(f"expected {N_TOKENS} tokens, got {len(tokens)}", line_no, len(tokens) + 1)
        if len(tokens) > N_TOKENS:
            raise ParseError(f"unexpected token '{tokens[N_TOKENS]}'", line_no, N_TOKENS + 1)
        values = []
        for column, token in enumerate(tokens[2:], start=3):
            try:
                values.append(float(token))
            except ValueError:
                raise NonNumericCoordinate(f"'{token}' is not a number", line_no, column) from None
        try:
            records.append(
                DetectionRecord(
                    image_id=tokens[0],
                    category=tokens[1],
                    score=values[0],
                    box=quad_to_obb(Quad(values[1:])),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from exc
    return records


def read_detections(path: Union[str, Path]) -> list[DetectionRecord]:
    return parse_detections(Path(path).read_text(encoding="utf-8"))
