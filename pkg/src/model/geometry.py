"""Geometric value types: oriented boxes, quads, convex polygons, point-axis targets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from model.axis import AxisEncoding
from utils.errors import InvalidBox, InvalidQuad


@dataclass(frozen=True)
class OrientedBox:
    """Rotated rectangle; ``w`` lies along ``theta`` measured from the image x-axis."""

    cx: float
    cy: float
    w: float
    h: float
    theta: float

    def __post_init__(self):
        values = (self.cx, self.cy, self.w, self.h, self.theta)
        if not all(math.isfinite(v) for v in values):
            raise InvalidBox(f"non-finite box field in {values}")
        if self.w <= 0 or self.h <= 0:
            raise InvalidBox(f"box sides must be positive, got w={self.w}, h={self.h}")
        if not 0.0 <= self.theta < math.pi:
            raise InvalidBox(f"theta must lie in [0, pi), got {self.theta}")

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(eq=False)
class Quad:
    """Four annotated corners ``(x, y)`` in pixels."""

    corners: np.ndarray

    def __post_init__(self):
        self.corners = np.asarray(self.corners, dtype=np.float64).reshape(-1, 2)
        if self.corners.shape != (4, 2):
            raise InvalidQuad(f"quad needs 4 corners, got {self.corners.shape[0]}")
        if not np.all(np.isfinite(self.corners)):
            raise InvalidQuad("quad corners must be finite")

    def flat(self) -> list[float]:
        """Return ``[x1, y1, ..., x4, y4]``."""
        return [float(v) for v in self.corners.reshape(-1)]

    def is_simple(self) -> bool:
        from geometry.polygon import is_simple_quad

        return is_simple_quad(self.corners)

    def canonical(self) -> "Quad":
        """Same corners in counter-clockwise order (y up)."""
        from geometry.polygon import canonical_ccw

        return Quad(canonical_ccw(self.corners))


@dataclass(eq=False)
class ConvexPolygon:
    """Counter-clockwise convex polygon; zero vertices is the empty polygon."""

    vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)

    @classmethod
    def empty(cls) -> "ConvexPolygon":
        return cls(np.zeros((0, 2)))

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) < 3


@dataclass(eq=False)
class PointAxisTarget:
    """Ground truth as centre ``C``, four radial vectors ``V`` and axis label ``A``.

    Radials are ordered counter-clockwise starting along the box width axis:
    ``v1 = -v3`` and ``v2 = -v4`` with ``v1 . v2 = 0``.
    """

    center: np.ndarray
    radials: np.ndarray
    axis: AxisEncoding

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64).reshape(2)
        self.radials = np.asarray(self.radials, dtype=np.float64).reshape(4, 2)

    def scaled(self, scale: float) -> "PointAxisTarget":
        """Return the target with coordinates divided by ``scale`` (pixels -> normalised).

        :param scale: Positive divisor applied to centre and radials.
        :return: New :class:`PointAxisTarget` sharing the axis encoding.
        """
        return PointAxisTarget(self.center / scale, self.radials / scale, self.axis)
