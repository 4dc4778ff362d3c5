"""Sigmoid focal loss for class logits, with its closed-form gradient."""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.special import expit

from losses.cross_axis import log_sigmoid
from model.loss import LossOutput
from utils.errors import IndexOutOfRange, LengthMismatch

BACKGROUND = -1


def one_hot_targets(class_targets, n_classes: int) -> np.ndarray:
    """``(Q, n_classes)`` 0/1 matrix; background rows (``-1``) are all zero.

    :raises IndexOutOfRange: If a class id is outside ``[-1, n_classes)``.
    """

    ids = np.asarray(class_targets, dtype=np.int64).reshape(-1)
    bad = (ids < BACKGROUND) | (ids >= n_classes)
    if np.any(bad):
        raise IndexOutOfRange(f"class id {int(ids[bad][0])} outside [-1, {n_classes})")
    onehot = np.zeros((ids.shape[0], n_classes))
    rows = np.nonzero(ids >= 0)[0]
    onehot[rows, ids[rows]] = 1.0
    return onehot


def focal_terms(logits: np.ndarray, targets: np.ndarray, alpha: float, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise focal loss and its derivative w.r.t. the logits."""

    p = expit(logits)
    log_p, log_q = log_sigmoid(logits), log_sigmoid(-logits)
    q = 1.0 - p
    pos_loss = -alpha * q ** gamma * log_p
    neg_loss = -(1.0 - alpha) * p ** gamma * log_q
    pos_grad = alpha * q ** gamma * (gamma * p * log_p - q)
    neg_grad = (1.0 - alpha) * p ** gamma * (p - gamma * q * log_q)
    loss = np.where(targets > 0, pos_loss, neg_loss)
    grad = np.where(targets > 0, pos_grad, neg_grad)
    return loss, grad


def classification_loss(
    class_logits,
    class_targets,
    alpha: float = 0.25,
    gamma: float = 2.0,
    normalizer: Optional[float] = None,
) -> LossOutput:
    """Summed sigmoid focal loss divided by ``max(1, positives)``.

    :param class_logits: ``(Q, n_classes)`` logits.
    :param class_targets: ``Q`` class ids, ``-1`` for background.
    :param alpha: Positive-class weight.
    :param gamma: Focusing exponent.
    :param normalizer: Override for the divisor.
    :return: :class:`LossOutput` with gradient ``class_logits``.
    :raises IndexOutOfRange: For class ids outside ``[-1, n_classes)``.
    """

    logits = np.asarray(class_logits, dtype=np.float64)
    logits = logits.reshape(logits.shape[0] if logits.ndim else 1, -1)
    targets = one_hot_targets(class_targets, logits.shape[1])
    if targets.shape[0] != logits.shape[0]:
        raise LengthMismatch(f"{targets.shape[0]} targets for {logits.shape[0]} queries")
    divisor = normalizer if normalizer is not None else max(1.0, float(targets.sum()))
    loss, grad = focal_terms(logits, targets, alpha, gamma)
    value = float(loss.sum()) / divisor
    return LossOutput(value=value, gradients={"class_logits": grad / divisor}, terms={"cls": value})
