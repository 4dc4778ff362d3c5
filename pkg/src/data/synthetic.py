"""Seeded synthetic scenes of non-overlapping oriented rectangles.

Each scene draws from its own ``SeedSequence([seed, split, index])``, so
scene ``i`` does not depend on how many scenes are generated. Rectangles are
filled with a class colour over uniform noise, and the two ends of each
rectangle's long axis are darkened so the orientation can be read from pixels.
"""

from __future__ import annotations

import math

import numpy as np

from geometry.boxes import box_axes, obb_to_quad, rotated_iou
from model.geometry import OrientedBox
from model.records import Annotation, SceneParams, SyntheticScene
from utils.errors import InvalidConfig, PlacementFailure

SPLITS = {"train": 0, "val": 1}

NOISE_LEVEL = 0.2
END_CAP_FRACTION = 0.2
END_CAP_SHADE = 0.45
PALETTE = np.array(
    [
        [0.95, 0.35, 0.25],
        [0.25, 0.55, 0.95],
        [0.35, 0.90, 0.40],
        [0.95, 0.85, 0.25],
        [0.80, 0.35, 0.90],
        [0.30, 0.90, 0.90],
    ]
)


def class_color(index: int) -> np.ndarray:
    return PALETTE[index % len(PALETTE)]


def scene_rng(seed: int, split: str, index: int) -> np.random.Generator:
    if split not in SPLITS:
        raise InvalidConfig(f"unknown split '{split}', expected one of {', '.join(SPLITS)}")
    return np.random.default_rng(np.random.SeedSequence([seed, SPLITS[split], index]))


def _sample_box(rng: np.random.Generator, params: SceneParams) -> OrientedBox | None:
    length = rng.uniform(*params.size_range)
    aspect = rng.uniform(*params.aspect_range)
    theta = rng.uniform(0.0, math.pi)
    w, h = length, length / aspect
    c, s = abs(math.cos(theta)), abs(math.sin(theta))
    half_x = 0.5 * (w * c + h * s)
    half_y = 0.5 * (w * s + h * c)
    if 2.0 * half_x + 1.0 > params.width or 2.0 * half_y + 1.0 > params.height:
        return None
    cx = rng.uniform(half_x + 0.5, params.width - half_x - 0.5)
    cy = rng.uniform(half_y + 0.5, params.height - half_y - 0.5)
    return OrientedBox(cx, cy, w, h, theta)


def place_boxes(rng: np.random.Generator, params: SceneParams, count: int) -> list[OrientedBox]:
    """Rejection-sample ``count`` in-bounds boxes whose pairwise IoU stays below ``max_iou``.

    :raises PlacementFailure: When one box needs more than ``max_attempts`` draws.
    """

    boxes: list[OrientedBox] = []
    for slot in range(count):
        for _ in range(params.max_attempts):
            box = _sample_box(rng, params)
            if box is not None and all(rotated_iou(box, other) < params.max_iou for other in boxes):
                boxes.append(box)
                break
        else:
            raise PlacementFailure(
                f"could not place object {slot + 1} of {count} in {params.max_attempts} attempts "
                f"({params.height}x{params.width}, size_range={params.size_range})"
            )
    return boxes


def render_scene(rng: np.random.Generator, params: SceneParams, boxes: list[OrientedBox], class_ids: list[int]) -> np.ndarray:
    """``(H, W, 3)`` float image in ``[0, 1]``; later boxes paint over earlier ones."""

    image = rng.uniform(0.0, NOISE_LEVEL, size=(params.height, params.width, 3))
    ys, xs = np.mgrid[0 : params.height, 0 : params.width]
    px, py = xs + 0.5, ys + 0.5
    for box, cls in zip(boxes, class_ids):
        u, v = box_axes(box.theta)
        du = (px - box.cx) * u[0] + (py - box.cy) * u[1]
        dv = (px - box.cx) * v[0] + (py - box.cy) * v[1]
        inside = (np.abs(du) <= box.w / 2) & (np.abs(dv) <= box.h / 2)
        cap = inside & (np.abs(du) >= box.w / 2 * (1.0 - 2.0 * END_CAP_FRACTION))
        image[inside] = class_color(cls)
        image[cap] *= END_CAP_SHADE
    return np.clip(image, 0.0, 1.0)


def generate_scene(seed: int, params: SceneParams, index: int, split: str = "train") -> SyntheticScene:
    rng = scene_rng(seed, split, index)
    count = int(rng.integers(1, params.max_objects + 1))
    boxes = place_boxes(rng, params, count)
    class_ids = [int(c) for c in rng.integers(0, len(params.classes), size=count)]
    image = render_scene(rng, params, boxes, class_ids)
    annotations = [Annotation(quad=obb_to_quad(b), category=params.classes[c]) for b, c in zip(boxes, class_ids)]
    return SyntheticScene(image=image, annotations=annotations, seed=seed, scene_id=f"{split}_{index:04d}")


def generate_synthetic(seed: int, params: SceneParams, split: str = "train") -> list[SyntheticScene]:
    """Generate ``params.n_images`` reproducible scenes.

    :param seed: Root seed.
    :param params: Scene parameters.
    :param split: Seed namespace, ``train`` or ``val``.
    :raises PlacementFailure: If the parameters are too dense to place an object.
    """

    return [generate_scene(seed, params, i, split) for i in range(params.n_images)]
