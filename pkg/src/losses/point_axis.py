"""Combined point-axis set loss over one image's matched predictions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from losses.cross_axis import cross_axis_loss
from losses.focal import BACKGROUND, classification_loss
from losses.projection import max_projection_variant
from model.config import LossConfig
from model.geometry import PointAxisTarget
from model.loss import LossOutput
from model.prediction import PointSetPrediction
from utils.errors import EmptyBatch, IndexOutOfRange


def point_axis_loss(
    predictions: Sequence[PointSetPrediction],
    targets: Sequence[PointAxisTarget],
    target_classes: Sequence[int],
    matches: Sequence[tuple[int, int]],
    cfg: LossConfig,
) -> LossOutput:
    """``(1/N) sum_i (lambda1 L_proj + lambda2 L_ca) + cls_weight L_cls``.

    ``matches`` pairs prediction indices with target indices. Unmatched
    predictions only receive the background classification gradient. Axis terms
    are skipped for predictions without axis logits (fixed-axis mode).

    :param predictions: All Q predictions of one image (normalised coordinates).
    :param targets: Ground-truth targets in the same coordinates.
    :param target_classes: Class id per target.
    :param matches: ``(prediction_index, target_index)`` pairs.
    :param cfg: Loss weights and variant.
    :return: :class:`LossOutput` with gradients ``points`` ``(Q, K, 2)``,
        ``axis_logits`` ``(Q, n_bins)`` (absent in fixed-axis mode) and
        ``class_logits`` ``(Q, n_classes)``; terms ``proj``, ``ca``, ``cls``.
    :raises EmptyBatch: If there are no matches.
    """

    if not matches:
        raise EmptyBatch("point-axis loss needs at least one matched prediction")
    n = len(matches)
    has_axis = predictions[0].axis_logits is not None

    grad_points = np.zeros((len(predictions),) + predictions[0].points.shape)
    grad_axis = np.zeros((len(predictions), predictions[0].axis_logits.shape[0])) if has_axis else None
    class_ids = np.full(len(predictions), BACKGROUND, dtype=np.int64)

    proj_total = 0.0
    ca_total = 0.0
    for pred_index, target_index in matches:
        if not 0 <= target_index < len(targets):
            raise IndexOutOfRange(f"target index {target_index} out of range")
        pred, target = predictions[pred_index], targets[target_index]
        proj = max_projection_variant(pred.points, target, cfg.variant, cfg.top_k)
        proj_total += proj.value
        grad_points[pred_index] += cfg.lambda1 * proj.gradients["points"] / n
        if has_axis:
            ca = cross_axis_loss(pred.axis_logits, target.axis, cfg.codec.epsilon)
            ca_total += ca.value
            grad_axis[pred_index] += cfg.lambda2 * ca.gradients["axis_logits"] / n
        class_ids[pred_index] = target_classes[target_index]

    logits = np.stack([p.class_logits for p in predictions])
    cls = classification_loss(logits, class_ids, cfg.focal_alpha, cfg.focal_gamma)

    proj_mean, ca_mean = proj_total / n, ca_total / n
    value = cfg.lambda1 * proj_mean + cfg.lambda2 * ca_mean + cfg.cls_weight * cls.value
    gradients = {"points": grad_points, "class_logits": cfg.cls_weight * cls.gradients["class_logits"]}
    if has_axis:
        gradients["axis_logits"] = grad_axis
    return LossOutput(value=value, gradients=gradients, terms={"proj": proj_mean, "ca": ca_mean, "cls": cls.value})
