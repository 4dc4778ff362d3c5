"""Prediction heads mapping decoder queries to points, axis logits and class logits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from detector.queries import prior_bias
from model.config import ModelConfig
from nn.layers import MLP, Linear
from nn.module import Module
from nn.tensor import Tensor, inverse_sigmoid, sigmoid


@dataclass
class HeadOutput:
    """Per-layer head outputs for N owners: points ``(N, K, 2)``, axis ``(N, n_bins)`` or None, classes ``(N, C)``."""

    points: Tensor
    axis_logits: Optional[Tensor]
    class_logits: Tensor


class PointSetHead(Module):
    """Point offsets per query; axis and class logits from the mean of each owner's K queries.

    Points are ``sigmoid(logit(ref) + offset)``, so a zero offset reproduces the
    reference position. The offset MLP reads each query plus its positional
    embedding.
    The axis MLP is absent in fixed-axis mode.
    """

    def __init__(self, cfg: ModelConfig, n_bins: int, rng: np.random.Generator):
        self.point_mlp = MLP(cfg.dim, cfg.dim, 2, 3, rng)
        self.point_mlp.last.reset_constant(0.0, 0.0)
        self.axis_mlp = None if cfg.fixed_axis_mode else MLP(cfg.dim, cfg.dim, n_bins, 2, rng)
        self.class_head = Linear(cfg.dim, cfg.n_classes, rng)
        self.class_head.bias.data[:] = prior_bias()

    def forward(self, x: Tensor, refs: Union[Tensor, np.ndarray], pos: Optional[Tensor] = None) -> HeadOutput:
        """
        :param x: ``(N, K, dim)`` decoded point queries.
        :param refs: ``(N, K, 2)`` current normalised reference positions.
        :param pos: ``(N, K, dim)`` positional embeddings of ``refs``.
        """

        query = x if pos is None else x + pos
        points = sigmoid(inverse_sigmoid(refs) + self.point_mlp(query))
        pooled = x.mean(axis=1)
        axis = self.axis_mlp(pooled) if self.axis_mlp is not None else None
        return HeadOutput(points=points, axis_logits=axis, class_logits=self.class_head(pooled))


class ObjectPointsHead(Module):
    """Baseline head: one object query directly regresses K point offsets around its reference."""

    def __init__(self, cfg: ModelConfig, n_bins: int, rng: np.random.Generator):
        self.K = cfg.K
        self.point_mlp = MLP(cfg.dim, cfg.dim, 2 * cfg.K, 3, rng)
        self.point_mlp.last.reset_constant(0.0, 0.0)
        self.axis_mlp = None if cfg.fixed_axis_mode else MLP(cfg.dim, cfg.dim, n_bins, 2, rng)
        self.class_head = Linear(cfg.dim, cfg.n_classes, rng)
        self.class_head.bias.data[:] = prior_bias()

    def forward(self, x: Tensor, refs: np.ndarray) -> HeadOutput:
        """
        :param x: ``(N, dim)`` object queries.
        :param refs: ``(N, K, 2)`` reference positions (the object reference repeated, or refined points).
        """

        n = x.shape[0]
        offsets = self.point_mlp(x).reshape(n, self.K, 2)
        points = sigmoid(inverse_sigmoid(refs) + offsets)
        axis = self.axis_mlp(x) if self.axis_mlp is not None else None
        return HeadOutput(points=points, axis_logits=axis, class_logits=self.class_head(x))
