"""Top-N object query selection and object-to-point query conversion."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from detector.frame import ImageFrame
from model.config import ModelConfig
from model.prediction import ObjectQuery, PointQuery
from nn.encoding import position_embedding_2d
from nn.layers import MLP, Linear
from nn.module import Module
from nn.tensor import Tensor, as_tensor, concat
from utils.errors import NotEnoughCells

PRIOR_PROB = 0.01


def prior_bias(prob: float = PRIOR_PROB) -> float:
    return -math.log((1.0 - prob) / prob)


def top_cells(scores: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` highest scores; equal scores keep row-major order.

    :raises NotEnoughCells: If fewer than ``n`` scores are given.
    """

    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    if scores.size < n:
        raise NotEnoughCells(f"feature map has {scores.size} cells, {n} object queries requested")
    return np.argsort(-scores, kind="stable")[:n]


class CellScoreHead(Module):
    """Linear cell scorer used to pick object queries; bias starts at the focal prior."""

    def __init__(self, dim: int, rng: np.random.Generator):
        self.linear = Linear(dim, 1, rng)
        self.linear.bias.data[:] = prior_bias()

    def forward(self, tokens: Tensor) -> Tensor:
        return self.linear(tokens).reshape(tokens.shape[0])


def select_object_queries(feature_map, scores, n: int, frame: ImageFrame) -> list[ObjectQuery]:
    """Turn the ``n`` best-scoring cells into object queries.

    :param feature_map: ``(H, W, dim)`` tensor or array.
    :param scores: ``H * W`` cell scores in row-major order.
    :param n: Number of object queries.
    :param frame: Image frame supplying normalised cell centres.
    :return: Queries sorted by score (descending).
    :raises NotEnoughCells: If ``H * W < n``.
    """

    fmap = as_tensor(feature_map).data
    tokens = fmap.reshape(-1, fmap.shape[-1])
    score_values = as_tensor(scores).data.reshape(-1)
    centers = frame.cell_centers()
    return [
        ObjectQuery(content=tokens[i].copy(), ref_point=centers[i].copy(), score=float(score_values[i]))
        for i in top_cells(score_values, n)
    ]


class ObjectToPointConverter(Module):
    """Condition K point queries on each object query.

    The centre query sits at ``ref + (dx, dy)``; boundary query ``j`` sits at
    ``ref + r_j (cos t_j, sin t_j)`` with ``t_j = 2*pi*(j - 1) / (K - 1)``
    counter-clockwise from the image x-axis. Offsets and radii come from MLPs on
    the object content, which is also every point query's content.
    """

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.K = cfg.K
        self.dim = cfg.dim
        self.center_mlp = MLP(cfg.dim, cfg.dim, 2, 2, rng)
        self.radius_mlp = MLP(cfg.dim, cfg.dim, cfg.K - 1, 2, rng)
        self.center_mlp.last.reset_constant(0.0, 0.0)
        self.radius_mlp.last.reset_constant(0.0, cfg.init_radius)
        angles = 2.0 * math.pi * np.arange(cfg.K - 1) / (cfg.K - 1)
        self.directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

    def forward(self, content: Tensor, ref_points: np.ndarray) -> tuple[Tensor, Tensor]:
        """
        :param content: ``(N, dim)`` object query contents.
        :param ref_points: ``(N, 2)`` normalised reference points.
        :return: ``(positions (N, K, 2), positional embeddings (N, K, dim))``; slot K-1 is the centre.
        """

        n = content.shape[0]
        refs = np.asarray(ref_points, dtype=np.float64).reshape(n, 1, 2)
        radii = self.radius_mlp(content).reshape(n, self.K - 1, 1)
        boundary = radii * self.directions + refs
        center = self.center_mlp(content).reshape(n, 1, 2) + refs
        positions = concat([boundary, center], axis=1)
        return positions, position_embedding_2d(positions, self.dim)

    def convert(self, queries: Sequence[ObjectQuery]) -> list[list[PointQuery]]:
        """Point queries per owner, slots ``1..K`` with slot K the centre."""

        content = Tensor(np.stack([q.content for q in queries]))
        positions, pos = self.forward(content, np.stack([q.ref_point for q in queries]))
        return [
            [
                PointQuery(
                    content=q.content.copy(),
                    positional=pos.data[i, j].copy(),
                    position=positions.data[i, j].copy(),
                    owner=i,
                    slot=j + 1,
                )
                for j in range(self.K)
            ]
            for i, q in enumerate(queries)
        ]
