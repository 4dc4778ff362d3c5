"""Convex polygon helpers: shoelace area, CCW ordering, simplicity, Sutherland-Hodgman clipping."""

from __future__ import annotations

import numpy as np

from model.geometry import ConvexPolygon

EPS = 1e-9


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; positive for counter-clockwise vertex order."""

    pts = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def canonical_ccw(vertices: np.ndarray) -> np.ndarray:
    """Return the vertices in counter-clockwise order (reversed if clockwise)."""

    pts = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
    return pts[::-1].copy() if polygon_area(pts) < 0 else pts.copy()


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    return ((d1 > EPS and d2 < -EPS) or (d1 < -EPS and d2 > EPS)) and (
        (d3 > EPS and d4 < -EPS) or (d3 < -EPS and d4 > EPS)
    )


def is_simple_quad(corners: np.ndarray) -> bool:
    """True when the two pairs of opposite edges of a quad do not cross."""

    c = np.asarray(corners, dtype=np.float64).reshape(4, 2)
    return not (_segments_cross(c[0], c[1], c[2], c[3]) or _segments_cross(c[1], c[2], c[3], c[0]))


def convex_clip(subject: ConvexPolygon, clip: ConvexPolygon) -> ConvexPolygon:
    """Intersect two counter-clockwise convex polygons.

    :param subject: Polygon being clipped.
    :param clip: Convex clipping window.
    :return: Intersection polygon, or the empty polygon when they do not overlap.
    """

    if subject.is_empty or clip.is_empty:
        return ConvexPolygon.empty()

    output = [p for p in subject.vertices]
    window = clip.vertices
    for i in range(len(window)):
        a = window[i]
        b = window[(i + 1) % len(window)]
        source, output = output, []
        if not source:
            break
        for j in range(len(source)):
            p = source[j]
            q = source[(j + 1) % len(source)]
            cp = _cross(a, b, p)
            cq = _cross(a, b, q)
            p_in = cp >= -EPS
            q_in = cq >= -EPS
            if p_in:
                output.append(p)
            if p_in != q_in:
                t = cp / (cp - cq)
                output.append(p + t * (q - p))
    if len(output) < 3:
        return ConvexPolygon.empty()
    return ConvexPolygon(np.array(output))


def convex_area(polygon: ConvexPolygon) -> float:
    return 0.0 if polygon.is_empty else abs(polygon_area(polygon.vertices))
