"""Inference and evaluation: decode detections per scene and score them with rotated-box AP."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from scipy.special import expit

from detector.oriented_detr import OrientedDETR
from geometry.boxes import quad_to_obb
from geometry.point_axis import decode_min_area, decode_point_axis
from matching.average_precision import average_precision
from model.records import APResult, DetectionRecord, GroundTruthRecord, SyntheticScene
from utils.errors import DegeneratePointSet

DECODERS = ("point_axis", "min_area")


def detect(
    model: OrientedDETR, scene: SyntheticScene, classes: Sequence[str], decoder: str = "point_axis"
) -> list[DetectionRecord]:
    """One detection per object query of the last decoder layer, in query order.

    Score and category come from the best class probability. No score
    threshold or NMS is applied.

    :param decoder: ``point_axis`` or the ``min_area`` baseline; queries whose
        points are collinear are dropped by the baseline.
    """

    image = scene.image
    predictions = model.predict(image)[-1]
    scale = float(max(image.shape[0], image.shape[1]))
    records = []
    for pred in predictions:
        probs = expit(pred.class_logits)
        best = int(np.argmax(probs))
        if decoder == "min_area":
            try:
                box = decode_min_area(pred, scale)
            except DegeneratePointSet:
                continue
        else:
            box = decode_point_axis(pred, model.codec, scale)
        records.append(DetectionRecord(image_id=scene.scene_id, category=classes[best], score=float(probs[best]), box=box))
    return records


def ground_truth_records(scenes: Sequence[SyntheticScene]) -> list[GroundTruthRecord]:
    return [
        GroundTruthRecord(image_id=scene.scene_id, category=ann.category, box=quad_to_obb(ann.quad), difficult=ann.difficult)
        for scene in scenes
        for ann in scene.annotations
    ]


def detect_all(
    model: OrientedDETR,
    scenes: Sequence[SyntheticScene],
    classes: Sequence[str],
    threads: int = 1,
    decoder: str = "point_axis",
) -> list[DetectionRecord]:
    """Detections of every scene, concatenated in scene order whatever ``threads`` is."""

    if threads <= 1:
        per_scene = [detect(model, scene, classes, decoder) for scene in scenes]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_scene = list(pool.map(lambda s: detect(model, s, classes, decoder), scenes))
    return [det for dets in per_scene for det in dets]


def evaluate(
    model: OrientedDETR,
    scenes: Sequence[SyntheticScene],
    classes: Sequence[str],
    iou_thresholds: Sequence[float] = (0.5, 0.75),
    protocol: str = "voc12",
    threads: int = 1,
) -> dict[float, APResult]:
    """AP results keyed by IoU threshold."""

    detections = detect_all(model, scenes, classes, threads)
    gts = ground_truth_records(scenes)
    return {thr: average_precision(detections, gts, thr, protocol) for thr in iou_thresholds}
