"""DOTA annotation text: ``x1 y1 x2 y2 x3 y3 x4 y4 category [difficult]`` per object.

Optional ``imagesource:`` and ``gsd:`` header lines are kept as metadata.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Union

from model.geometry import Quad
from model.records import Annotation, DotaFile
from utils.errors import NonNumericCoordinate, ParseError, TooFewTokens

HEADER_KEYS = ("imagesource", "gsd")
N_COORDS = 8


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_line(tokens: list[str], line_no: int) -> Annotation:
    if len(tokens) < N_COORDS + 1:
        raise TooFewTokens(f"expected at least {N_COORDS + 1} tokens, got {len(tokens)}", line_no, len(tokens) + 1)
    coords = []
    for column, token in enumerate(tokens[:N_COORDS], start=1):
        try:
            value = float(token)
        except ValueError:
            raise NonNumericCoordinate(f"'{token}' is not a number", line_no, column) from None
        if not math.isfinite(value):
            raise NonNumericCoordinate(f"'{token}' is not a finite number", line_no, column)
        coords.append(value)

    category = tokens[N_COORDS]
    if _is_number(category):
        raise ParseError(f"expected a category name, got '{category}'", line_no, N_COORDS + 1)
    difficult = 0
    if len(tokens) > N_COORDS + 1:
        token = tokens[N_COORDS + 1]
        if token not in ("0", "1"):
            raise ParseError(f"difficulty must be 0 or 1, got '{token}'", line_no, N_COORDS + 2)
        difficult = int(token)
    if len(tokens) > N_COORDS + 2:
        raise ParseError(f"unexpected token '{tokens[N_COORDS + 2]}'", line_no, N_COORDS + 3)
    return Annotation(quad=Quad(coords), category=category, difficult=difficult)


def parse_dota(text: str) -> DotaFile:
    """Parse an annotation file.

    :param text: File contents.
    :return: Annotations in file order plus header metadata.
    :raises TooFewTokens: If an object line has fewer than 9 tokens.
    :raises NonNumericCoordinate: If a coordinate token is not a finite number.
    :raises ParseError: For a numeric category, bad difficulty or trailing tokens.
    """

    doc = DotaFile(annotations=[])
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition(":")
        if sep and key in HEADER_KEYS:
            doc.metadata[key] = value.strip()
            continue
        doc.annotations.append(_parse_line(stripped.split(), line_no))
    return doc


def _format_coord(value: float) -> str:
    return str(int(value)) if value.is_integer() else repr(value)


def serialize_dota(doc: DotaFile) -> str:
    """Inverse of :func:`parse_dota`; integer-valued coordinates are written without a fraction."""

    lines = [f"{key}:{doc.metadata[key]}" for key in HEADER_KEYS if key in doc.metadata]
    for ann in doc.annotations:
        coords = " ".join(_format_coord(v) for v in ann.quad.flat())
        lines.append(f"{coords} {ann.category} {ann.difficult}")
    return "".join(line + "\n" for line in lines)


def read_dota(path: Union[str, Path]) -> DotaFile:
    return parse_dota(Path(path).read_text(encoding="utf-8"))


def write_dota(path: Union[str, Path], doc: DotaFile) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(serialize_dota(doc), encoding="utf-8")
    return target
