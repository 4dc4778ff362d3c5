"""Set criterion: per-layer Hungarian matching plus the point-axis loss, and the encoder cell-score loss."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from detector.frame import ImageFrame
from detector.oriented_detr import ForwardOutput, layer_predictions
from geometry.boxes import box_axes, quad_to_obb
from geometry.point_axis import quad_to_point_axis_target
from losses.focal import BACKGROUND, classification_loss
from losses.point_axis import point_axis_loss
from matching.cost import cost_matrix
from matching.hungarian import hungarian
from model.config import AxisCodecConfig, LossConfig
from model.geometry import OrientedBox, PointAxisTarget
from model.records import SyntheticScene
from nn.tensor import Tensor, attach_loss
from utils.errors import IndexOutOfRange

TERMS = ("proj", "ca", "cls", "enc")


@dataclass(eq=False)
class SceneTargets:
    """Ground truth of one scene in normalised coordinates (boxes stay in pixels)."""

    targets: list[PointAxisTarget]
    classes: list[int]
    boxes: list[OrientedBox]


def prepare_targets(
    scene: SyntheticScene, classes: Sequence[str], codec: AxisCodecConfig, scale: float
) -> SceneTargets:
    """Convert a scene's annotations into point-axis targets divided by ``scale``.

    :raises IndexOutOfRange: For a category outside ``classes``.
    """

    index = {name: i for i, name in enumerate(classes)}
    targets, class_ids, boxes = [], [], []
    for ann in scene.annotations:
        if ann.category not in index:
            raise IndexOutOfRange(f"scene {scene.scene_id}: unknown category '{ann.category}'")
        targets.append(quad_to_point_axis_target(ann.quad, codec).scaled(scale))
        class_ids.append(index[ann.category])
        boxes.append(quad_to_obb(ann.quad))
    return SceneTargets(targets=targets, classes=class_ids, boxes=boxes)


def cell_targets(frame: ImageFrame, boxes: Sequence[OrientedBox]) -> np.ndarray:
    """Class-agnostic cell labels: ``0`` when the cell centre lies inside a box, else background."""

    centers = frame.cell_centers() * frame.scale
    labels = np.full(len(centers), BACKGROUND, dtype=np.int64)
    for box in boxes:
        u, v = box_axes(box.theta)
        d = centers - np.array([box.cx, box.cy])
        inside = (np.abs(d @ u) <= box.w / 2) & (np.abs(d @ v) <= box.h / 2)
        labels[inside] = 0
    return labels


@dataclass
class CriterionOutput:
    loss: Tensor
    value: float
    terms: dict[str, float] = field(default_factory=dict)


class SetCriterion:
    """Loss of one forward pass against one scene's targets.

    Every decoder layer is matched and supervised independently when
    ``aux_loss`` is set, otherwise only the last. Reported ``proj``, ``ca`` and
    ``cls`` terms are averaged over the supervised layers.
    """

    def __init__(self, cfg: LossConfig):
        self.cfg = cfg

    def match(self, predictions, targets: SceneTargets) -> list[tuple[int, int]]:
        if not targets.targets:
            return []
        return hungarian(cost_matrix(predictions, targets.targets, targets.classes, self.cfg))

    def _layer_loss(self, layer, targets: SceneTargets) -> tuple[float, list, dict[str, float]]:
        predictions = layer_predictions(layer)
        matches = self.match(predictions, targets)
        if matches:
            out = point_axis_loss(predictions, targets.targets, targets.classes, matches, self.cfg)
            return out.value, self._pairs(layer, out.gradients), dict(out.terms)

        # empty scene: every query is background
        logits = np.stack([p.class_logits for p in predictions])
        background = np.full(len(predictions), BACKGROUND)
        cls = classification_loss(logits, background, self.cfg.focal_alpha, self.cfg.focal_gamma)
        grads = {"class_logits": self.cfg.cls_weight * cls.gradients["class_logits"]}
        return self.cfg.cls_weight * cls.value, self._pairs(layer, grads), {"proj": 0.0, "ca": 0.0, "cls": cls.value}

    @staticmethod
    def _pairs(layer, grads: dict[str, np.ndarray]) -> list:
        pairs = [(layer.points, grads["points"])] if "points" in grads else []
        if layer.axis_logits is not None and "axis_logits" in grads:
            pairs.append((layer.axis_logits, grads["axis_logits"]))
        pairs.append((layer.class_logits, grads["class_logits"]))
        return pairs

    def __call__(self, output: ForwardOutput, targets: SceneTargets) -> CriterionOutput:
        layers = output.layers if self.cfg.aux_loss else output.layers[-1:]
        value = 0.0
        pairs: list = []
        totals = dict.fromkeys(TERMS, 0.0)
        for layer in layers:
            layer_value, layer_pairs, terms = self._layer_loss(layer, targets)
            value += layer_value
            pairs.extend(layer_pairs)
            for key, term in terms.items():
                totals[key] += term / len(layers)

        if self.cfg.enc_weight > 0:
            labels = cell_targets(output.frame, targets.boxes)
            enc = classification_loss(
                output.cell_scores.data.reshape(-1, 1), labels, self.cfg.focal_alpha, self.cfg.focal_gamma
            )
            value += self.cfg.enc_weight * enc.value
            pairs.append((output.cell_scores, self.cfg.enc_weight * enc.gradients["class_logits"].reshape(-1)))
            totals["enc"] = enc.value

        return CriterionOutput(loss=attach_loss(value, pairs), value=value, terms=totals)
