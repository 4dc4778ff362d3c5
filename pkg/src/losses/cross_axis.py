"""Per-bin binary cross-entropy between predicted axis probabilities and the axis label."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from model.axis import AxisEncoding
from model.loss import LossOutput
from utils.errors import LengthMismatch


def log_sigmoid(x: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -x)


def cross_axis_loss(axis_logits, target_axis: AxisEncoding, epsilon: float = 1e-7) -> LossOutput:
    """Mean BCE over bins, each log term floored at ``log(epsilon)``.

    :param axis_logits: Pre-sigmoid scores, one per bin.
    :param target_axis: Ground-truth label of the same length.
    :param epsilon: Clamp floor for the probabilities inside each log.
    :return: :class:`LossOutput` with gradient ``axis_logits``; the gradient is
        ``(sigmoid(x) - A) / n_bins`` where no clamp is active.
    :raises LengthMismatch: If the lengths differ.
    """

    x = np.asarray(axis_logits, dtype=np.float64).reshape(-1)
    a = target_axis.values
    if x.shape != a.shape:
        raise LengthMismatch(f"axis logits have {x.shape[0]} bins, target has {a.shape[0]}")
    n = x.shape[0]
    floor = math.log(epsilon)

    log_p = log_sigmoid(x)
    log_q = log_sigmoid(-x)
    pos_active = log_p > floor
    neg_active = log_q > floor
    value = -float(np.sum(a * np.maximum(log_p, floor) + (1.0 - a) * np.maximum(log_q, floor))) / n

    p = expit(x)
    grad = (-(a * (1.0 - p)) * pos_active + ((1.0 - a) * p) * neg_active) / n
    return LossOutput(value=value, gradients={"axis_logits": grad}, terms={"ca": value})
