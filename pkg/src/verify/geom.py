"""Geometry oracles: rotated IoU against a stratified raster, min-area rectangle against brute force, max-projection loss semantics."""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from geometry import boxes
from geometry.boxes import box_axes, obb_to_quad
from geometry.point_axis import box_to_point_axis_target
from losses import projection
from model.config import AxisCodecConfig
from model.geometry import OrientedBox, PointAxisTarget
from model.records import PropertyResult
from verify.common import DEFAULT_SEED, check, result, suite_rng

NAMESPACE = 2
IOU_TOLERANCE = 1e-3
EXACT_TOLERANCE = 1e-9
CODEC = AxisCodecConfig(n_bins=36, sigma=1.0)
N_INTERIOR = 4


def random_box(rng: np.random.Generator) -> OrientedBox:
    return OrientedBox(
        cx=rng.uniform(0.0, 2.0),
        cy=rng.uniform(0.0, 2.0),
        w=rng.uniform(0.3, 2.5),
        h=rng.uniform(0.3, 2.5),
        theta=rng.uniform(0.0, math.pi),
    )


def _inside(box: OrientedBox, points: np.ndarray) -> np.ndarray:
    u, v = box_axes(box.theta)
    d = points - np.array([box.cx, box.cy])
    return (np.abs(d @ u) <= box.w / 2.0) & (np.abs(d @ v) <= box.h / 2.0)


@functools.lru_cache(maxsize=4)
def _grid(resolution: int) -> np.ndarray:
    return np.stack(np.meshgrid(np.arange(resolution), np.arange(resolution)), axis=-1).reshape(-1, 2).astype(np.float64)


def raster_iou(a: OrientedBox, b: OrientedBox, resolution: int, rng: np.random.Generator) -> float:
    """IoU estimated from one jittered sample per cell of a ``resolution`` square grid over both boxes."""

    corners = np.concatenate([obb_to_quad(a).corners, obb_to_quad(b).corners])
    low, high = corners.min(axis=0), corners.max(axis=0)
    cells = _grid(resolution)
    samples = low + (cells + rng.uniform(size=cells.shape)) * ((high - low) / resolution)
    in_a, in_b = _inside(a, samples), _inside(b, samples)
    union = np.count_nonzero(in_a | in_b)
    return np.count_nonzero(in_a & in_b) / union if union else 0.0


def iou_raster_property(pairs: int, resolution: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(pairs):
        a, b = random_box(rng), random_box(rng)
        errors.append(abs(boxes.rotated_iou(a, b) - raster_iou(a, b, resolution, rng)))
    return result("iou_vs_raster", errors, IOU_TOLERANCE, detail=f"{resolution}x{resolution} stratified samples per pair")


def iou_fixtures() -> list[PropertyResult]:
    box = OrientedBox(3.0, -1.0, 2.5, 1.25, 0.7)
    unit_a = OrientedBox(0.5, 0.5, 1.0, 1.0, 0.0)
    unit_b = OrientedBox(1.0, 1.0, 1.0, 1.0, 0.0)
    far = OrientedBox(10.0, 10.0, 1.0, 1.0, 0.3)
    return [
        check("iou_identical", boxes.rotated_iou(box, box) == 1.0),
        result("iou_offset_unit_squares", [abs(boxes.rotated_iou(unit_a, unit_b) - 1.0 / 7.0)], EXACT_TOLERANCE),
        check("iou_disjoint", boxes.rotated_iou(unit_a, far) == 0.0),
    ]


def iou_symmetry_property(pairs: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(pairs):
        a, b = random_box(rng), random_box(rng)
        errors.append(abs(boxes.rotated_iou(a, b) - boxes.rotated_iou(b, a)))
    return result("iou_symmetry", errors, 0.0)


def iou_translation_property(pairs: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(pairs):
        a, b = random_box(rng), random_box(rng)
        dx, dy = rng.uniform(-50.0, 50.0, size=2)
        a2 = OrientedBox(a.cx + dx, a.cy + dy, a.w, a.h, a.theta)
        b2 = OrientedBox(b.cx + dx, b.cy + dy, b.w, b.h, b.theta)
        errors.append(abs(boxes.rotated_iou(a, b) - boxes.rotated_iou(a2, b2)))
    return result("iou_translation", errors, EXACT_TOLERANCE)


def brute_force_min_area(points: np.ndarray) -> float:
    """Smallest enclosing-rectangle area over every direction through two of the points."""

    best = math.inf
    for i, j in itertools.combinations(range(len(points)), 2):
        edge = points[j] - points[i]
        length = math.hypot(edge[0], edge[1])
        if length < 1e-12:
            continue
        u = edge / length
        v = np.array([-u[1], u[0]])
        pu, pv = points @ u, points @ v
        best = min(best, float((pu.max() - pu.min()) * (pv.max() - pv.min())))
    return best


def min_area_property(sets: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(sets):
        points = rng.uniform(-5.0, 5.0, size=(int(rng.integers(3, 13)), 2))
        box = boxes.min_area_rect(points)
        expected = brute_force_min_area(points)
        u, v = box_axes(box.theta)
        d = points - np.array([box.cx, box.cy])
        spill = max(float(np.max(np.abs(d @ u)) - box.w / 2.0), float(np.max(np.abs(d @ v)) - box.h / 2.0), 0.0)
        errors.append(max(abs(box.area - expected) / expected, spill))
    return result("min_area_rect_vs_brute_force", errors, EXACT_TOLERANCE)


def _rotated(target: PointAxisTarget, points: np.ndarray, angle: float) -> tuple[PointAxisTarget, np.ndarray]:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return PointAxisTarget(rot @ target.center, target.radials @ rot.T, target.axis), points @ rot.T


def projection_rotation_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    """Rotating points and target together about the origin leaves the max-projection loss unchanged."""

    errors = []
    for _ in range(trials):
        target = box_to_point_axis_target(random_box(rng), CODEC)
        points = target.center + rng.normal(scale=1.0, size=(int(rng.integers(5, 14)), 2))
        turned_target, turned_points = _rotated(target, points, rng.uniform(-math.pi, math.pi))
        before = projection.max_projection_loss(points, target).value
        errors.append(abs(projection.max_projection_loss(turned_points, turned_target).value - before))
    return result("projection_rotation_invariance", errors, EXACT_TOLERANCE)


def projection_center_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    """With every point on the target centre the loss is the sum of the radial lengths."""

    errors = []
    for _ in range(trials):
        target = box_to_point_axis_target(random_box(rng), CODEC)
        points = np.repeat(target.center[None, :], int(rng.integers(5, 14)), axis=0)
        expected = float(np.linalg.norm(target.radials, axis=1).sum())
        errors.append(abs(projection.max_projection_loss(points, target).value - expected))
    return result("projection_all_points_at_center", errors, EXACT_TOLERANCE)


def touching_points(target: PointAxisTarget, rng: np.random.Generator) -> np.ndarray:
    """Points with zero loss: one on each edge (away from the corners), the rest strictly inside, centre exact."""

    radials = target.radials
    on_edges = [target.center + radials[j] + rng.uniform(-0.5, 0.5) * radials[(j + 1) % 4] for j in range(4)]
    inside = target.center + rng.uniform(-0.6, 0.6, size=(N_INTERIOR, 2)) @ radials[:2]
    boundary = np.concatenate([np.stack(on_edges), inside])[rng.permutation(4 + N_INTERIOR)]
    return np.concatenate([boundary, target.center[None, :]])


def projection_zero_set_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    """Loss is zero exactly when all points are inside and every edge is touched.

    Each trial builds a zero-loss set, then breaks one condition by ``delta``:
    pulling an edge's touching point inward leaves that edge untouched, pushing
    it outward puts it outside. Both must cost exactly ``delta``.
    """

    errors = []
    for _ in range(trials):
        target = box_to_point_axis_target(random_box(rng), CODEC)
        points = touching_points(target, rng)
        errors.append(projection.max_projection_loss(points, target).value)
        norms = np.linalg.norm(target.radials, axis=1)
        proj = projection.edge_projections(points, target)
        edge = int(rng.integers(4))
        toucher = int(np.argmax(proj[:, edge]))
        delta = rng.uniform(0.01, 0.1) * float(norms.min())
        for sign in (-1.0, 1.0):
            moved = points.copy()
            moved[toucher] += sign * delta * target.radials[edge] / norms[edge]
            errors.append(abs(projection.max_projection_loss(moved, target).value - delta))
    return result("projection_zero_set", errors, EXACT_TOLERANCE)


def run(quick: bool = False, seed: int = DEFAULT_SEED) -> list[PropertyResult]:
    rng = suite_rng(seed, NAMESPACE)
    pairs, resolution, sets = (20, 600, 50) if quick else (1000, 1000, 500)
    return [
        iou_raster_property(pairs, resolution, rng),
        *iou_fixtures(),
        iou_symmetry_property(pairs, rng),
        iou_translation_property(pairs, rng),
        min_area_property(sets, rng),
        projection_rotation_property(sets, rng),
        projection_center_property(sets, rng),
        projection_zero_set_property(sets, rng),
    ]
