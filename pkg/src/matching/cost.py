"""Matching cost between predictions and ground-truth targets, built from the loss terms."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import expit

from losses.cross_axis import log_sigmoid
from losses.projection import MIN_RADIAL
from model.config import LossConfig
from model.geometry import PointAxisTarget
from model.prediction import PointSetPrediction
from utils.errors import DegenerateTarget, InvalidK


def _projection_costs(points: np.ndarray, targets: Sequence[PointAxisTarget], cfg: LossConfig) -> np.ndarray:
    centers = np.stack([t.center for t in targets])
    radials = np.stack([t.radials for t in targets])
    norms = np.linalg.norm(radials, axis=-1)
    if np.any(norms < MIN_RADIAL):
        raise DegenerateTarget(f"radial vector shorter than {MIN_RADIAL}")
    units = radials / norms[..., None]

    offsets = points[:, None, :-1, :] - centers[None, :, None, :]
    proj = np.einsum("qtmd,tjd->qtmj", offsets, units) - norms[None, :, None, :]
    n_boundary = points.shape[1] - 1
    k = cfg.top_k if cfg.variant == "top_k" else 1
    if k > n_boundary:
        raise InvalidK(f"top_k must lie in [1, {n_boundary}], got {k}")
    if k == 1:
        extreme = proj.max(axis=2)
    else:
        extreme = -np.sort(-proj, axis=2, kind="stable")[:, :, :k, :].mean(axis=2)
    cost = np.abs(extreme).sum(axis=-1)
    if cfg.variant == "with_penalty":
        cost += np.clip(proj, 0.0, None).sum(axis=(2, 3))
    cost += np.linalg.norm(points[:, None, -1, :] - centers[None, :, :], axis=-1)
    return cost


def _cross_axis_costs(logits: np.ndarray, targets: Sequence[PointAxisTarget], epsilon: float) -> np.ndarray:
    labels = np.stack([t.axis.values for t in targets])
    floor = math.log(epsilon)
    log_p = np.maximum(log_sigmoid(logits), floor)
    log_q = np.maximum(log_sigmoid(-logits), floor)
    return -(log_p @ labels.T + log_q @ (1.0 - labels).T) / logits.shape[1]


def cost_matrix(
    predictions: Sequence[PointSetPrediction],
    targets: Sequence[PointAxisTarget],
    target_classes: Sequence[int],
    cfg: LossConfig,
) -> np.ndarray:
    """``(Q, T)`` costs ``lambda1 L_proj + lambda2 L_ca - cls_weight sigmoid(class logit)``.

    The cross-axis term is dropped for predictions without axis logits.

    :param predictions: Q predictions.
    :param targets: T targets in the predictions' coordinates.
    :param target_classes: Class id per target.
    :param cfg: Loss configuration supplying weights and projection variant.
    :return: Cost array; ``(Q, 0)`` when there are no targets.
    """

    if not targets:
        return np.zeros((len(predictions), 0))
    points = np.stack([p.points for p in predictions])
    cost = cfg.lambda1 * _projection_costs(points, targets, cfg)
    if predictions[0].axis_logits is not None:
        logits = np.stack([p.axis_logits for p in predictions])
        cost += cfg.lambda2 * _cross_axis_costs(logits, targets, cfg.codec.epsilon)
    class_logits = np.stack([p.class_logits for p in predictions])
    cost -= cfg.cls_weight * expit(class_logits[:, np.asarray(target_classes, dtype=np.int64)])
    return cost


def matching_cost(prediction: PointSetPrediction, target: PointAxisTarget, target_class: int, cfg: LossConfig) -> float:
    """Cost of pairing one prediction with one target; see :func:`cost_matrix`."""

    return float(cost_matrix([prediction], [target], [target_class], cfg)[0, 0])
