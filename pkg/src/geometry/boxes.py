"""Oriented box conversions, minimum-area enclosing rectangle and rotated IoU."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from geometry.polygon import EPS, convex_area, convex_clip, polygon_area
from model.geometry import ConvexPolygon, OrientedBox, Quad
from utils.errors import DegeneratePointSet, DegenerateQuad, InvalidQuad

_ANGLE_SNAP = 1e-12


def canonical_box(cx: float, cy: float, w: float, h: float, phi: float) -> OrientedBox:
    """Build the canonical box with ``theta`` in ``[0, pi/2)``.

    A rectangle with its ``w`` side along ``phi`` is the same set as one with the
    ``h`` side along ``phi - pi/2``; the representative whose angle falls in the
    first quarter turn is returned.
    """

    phi = math.fmod(phi, math.pi)
    if phi < 0:
        phi += math.pi
    if phi >= math.pi / 2 - _ANGLE_SNAP:
        phi -= math.pi / 2
        w, h = h, w
    if phi < _ANGLE_SNAP or phi >= math.pi / 2 - _ANGLE_SNAP:
        phi = 0.0
    return OrientedBox(float(cx), float(cy), float(w), float(h), float(phi))


def box_axes(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors along the ``w`` side and the ``h`` side of a box at ``theta``."""

    c, s = math.cos(theta), math.sin(theta)
    return np.array([c, s]), np.array([-s, c])


def obb_to_quad(box: OrientedBox) -> Quad:
    """Corners of ``box`` in counter-clockwise order, starting at ``c - u*w/2 - v*h/2``.

    :param box: Oriented box.
    :return: :class:`Quad` with 4 corners.
    """

    u, v = box_axes(box.theta)
    c = np.array([box.cx, box.cy])
    hu, hv = u * (box.w / 2.0), v * (box.h / 2.0)
    return Quad(np.stack([c - hu - hv, c + hu - hv, c + hu + hv, c - hu + hv]))


def obb_to_polygon(box: OrientedBox) -> ConvexPolygon:
    return ConvexPolygon(obb_to_quad(box).corners)


def min_area_rect(points) -> OrientedBox:
    """Minimum-area rectangle enclosing a planar point set.

    Every convex hull edge direction is tried; the rectangle aligned with the
    first edge reaching the minimum area is kept.

    :param points: Array-like of shape ``(n, 2)`` with ``n >= 3``.
    :return: Canonical :class:`OrientedBox` (``theta`` in ``[0, pi/2)``).
    :raises DegeneratePointSet: If fewer than 3 points are given or all are collinear.
    """

    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 3:
        raise DegeneratePointSet(f"need at least 3 points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise DegeneratePointSet("points must be finite")

    rel = pts - pts[0]
    far = rel[int(np.argmax(np.einsum("ij,ij->i", rel, rel)))]
    if float(np.max(np.abs(far[0] * rel[:, 1] - far[1] * rel[:, 0]))) <= EPS:
        raise DegeneratePointSet("all points are collinear")
    try:
        hull = pts[ConvexHull(pts).vertices]
    except QhullError as exc:
        raise DegeneratePointSet(f"convex hull failed: {exc}") from exc

    best = None
    for i in range(len(hull)):
        edge = hull[(i + 1) % len(hull)] - hull[i]
        length = math.hypot(edge[0], edge[1])
        if length < 1e-15:
            continue
        u = edge / length
        v = np.array([-u[1], u[0]])
        pu, pv = hull @ u, hull @ v
        w, h = float(pu.max() - pu.min()), float(pv.max() - pv.min())
        area = w * h
        if best is None or area < best[0]:
            center = u * (pu.max() + pu.min()) / 2.0 + v * (pv.max() + pv.min()) / 2.0
            best = (area, center, w, h, math.atan2(u[1], u[0]))

    _, center, w, h, phi = best
    if min(w, h) < EPS:
        raise DegeneratePointSet(f"enclosing rectangle is degenerate ({w} x {h})")
    return canonical_box(center[0], center[1], w, h, phi)


def quad_to_obb(quad: Quad) -> OrientedBox:
    """Minimum-area rectangle of a quad in canonical form.

    :param quad: Simple quad with positive area.
    :return: Canonical :class:`OrientedBox`.
    :raises InvalidQuad: If the quad is self-intersecting.
    :raises DegenerateQuad: If the enclosing rectangle has a side shorter than 1e-9.
    """

    if not quad.is_simple():
        raise InvalidQuad("quad edges intersect")
    corners = quad.canonical().corners
    if polygon_area(corners) <= 0:
        raise DegenerateQuad("quad has zero area")
    try:
        box = min_area_rect(corners)
    except DegeneratePointSet as exc:
        raise DegenerateQuad(str(exc)) from exc
    if min(box.w, box.h) < EPS:
        raise DegenerateQuad(f"rectangle side below tolerance: w={box.w}, h={box.h}")
    return box


def _order_key(box: OrientedBox) -> tuple:
    return (box.cx, box.cy, box.w, box.h, box.theta)


def rotated_iou(a: OrientedBox, b: OrientedBox) -> float:
    """Intersection over union of two oriented boxes.

    Inputs are put in a fixed order before clipping, so the result is exactly
    symmetric in its arguments.

    :param a: First box.
    :param b: Second box.
    :return: IoU in ``[0, 1]``.
    """

    if _order_key(b) < _order_key(a):
        a, b = b, a
    pa, pb = obb_to_polygon(a), obb_to_polygon(b)
    area_a, area_b = convex_area(pa), convex_area(pb)
    inter = convex_area(convex_clip(pa, pb))
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


def rotated_iou_matrix(boxes_a: Sequence[OrientedBox], boxes_b: Sequence[OrientedBox]) -> np.ndarray:
    """Pairwise :func:`rotated_iou` as a ``(len(a), len(b))`` array."""

    out = np.zeros((len(boxes_a), len(boxes_b)))
    for i, a in enumerate(boxes_a):
        for j, b in enumerate(boxes_b):
            out[i, j] = rotated_iou(a, b)
    return out
