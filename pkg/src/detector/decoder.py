"""Points detection decoder layer and the object-query baseline layer.

Point queries are held as an ``(N, K, dim)`` tensor: one row of K per owner,
slot ``K - 1`` (0-based) being the centre query. Each sub-block is wrapped in a
residual connection followed by layer norm.
"""

from __future__ import annotations

import numpy as np

from model.config import ModelConfig
from nn.attention import DeformableCrossAttention, MultiHeadSelfAttention
from nn.layers import FeedForward, LayerNorm
from nn.module import Module
from nn.tensor import Tensor, concat
from utils.errors import GroupSizeMismatch


class PointsDecoderLayer(Module):
    """Point-to-point, object-to-object, deformable cross-attention and FFN sub-blocks.

    With ``use_group_self_attention`` the point-to-point block attends within
    each owner's K queries (shared parameters across owners) and centre queries
    then attend to each other. Without it one attention runs over all N*K point
    queries and there is no object-to-object block. With
    ``use_decoupled_cross_attention`` centre and boundary queries sample through
    separate deformable attention parameters.
    """

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.K = cfg.K
        self.dim = cfg.dim
        self.grouped = cfg.use_group_self_attention
        self.point_attn = MultiHeadSelfAttention(cfg.attention, rng)
        self.norm_point = LayerNorm(cfg.dim)
        if self.grouped:
            self.object_attn = MultiHeadSelfAttention(cfg.attention, rng)
            self.norm_object = LayerNorm(cfg.dim)
        self.cross_boundary = DeformableCrossAttention(cfg.attention, rng)
        self.cross_center = DeformableCrossAttention(cfg.attention, rng) if cfg.use_decoupled_cross_attention else self.cross_boundary
        self.norm_cross = LayerNorm(cfg.dim)
        self.ffn = FeedForward(cfg.dim, cfg.ffn_dim, rng)
        self.norm_ffn = LayerNorm(cfg.dim)

    def _check(self, x: Tensor) -> None:
        if x.ndim != 3 or x.shape[1] != self.K or x.shape[2] != self.dim:
            raise GroupSizeMismatch(f"point queries must be (N, {self.K}, {self.dim}), got {x.shape}")

    def point_to_point(self, x: Tensor, pos: Tensor) -> Tensor:
        if self.grouped:
            return self.norm_point(x + self.point_attn(x, pos))
        n = x.shape[0]
        flat = self.point_attn(x.reshape(1, n * self.K, self.dim), pos.reshape(1, n * self.K, self.dim))
        return self.norm_point(x + flat.reshape(n, self.K, self.dim))

    def object_to_object(self, x: Tensor, pos: Tensor) -> Tensor:
        if not self.grouped:
            return x
        centers = x[:, self.K - 1, :]
        updated = self.norm_object(centers + self.object_attn(centers, pos[:, self.K - 1, :]))
        return concat([x[:, : self.K - 1, :], updated.reshape(x.shape[0], 1, self.dim)], axis=1)

    def cross_attention(self, x: Tensor, pos: Tensor, map_refs: np.ndarray, feature_map: Tensor) -> Tensor:
        n = x.shape[0]
        query = x + pos
        boundary = self.cross_boundary(
            query[:, : self.K - 1, :].reshape(n * (self.K - 1), self.dim),
            map_refs[:, : self.K - 1].reshape(-1, 2),
            feature_map,
        ).reshape(n, self.K - 1, self.dim)
        center = self.cross_center(query[:, self.K - 1, :], map_refs[:, self.K - 1], feature_map)
        return self.norm_cross(x + concat([boundary, center.reshape(n, 1, self.dim)], axis=1))

    def feed_forward(self, x: Tensor) -> Tensor:
        return self.norm_ffn(x + self.ffn(x))

    def forward(self, x: Tensor, pos: Tensor, map_refs: np.ndarray, feature_map: Tensor) -> Tensor:
        """
        :param x: ``(N, K, dim)`` point query contents.
        :param pos: ``(N, K, dim)`` positional embeddings.
        :param map_refs: ``(N, K, 2)`` reference positions in map coordinates.
        :param feature_map: ``(H, W, dim)``.
        :return: Updated ``(N, K, dim)`` contents.
        :raises GroupSizeMismatch: If queries do not come in groups of K.
        """

        self._check(x)
        x = self.point_to_point(x, pos)
        x = self.object_to_object(x, pos)
        x = self.cross_attention(x, pos, map_refs, feature_map)
        return self.feed_forward(x)


class ObjectDecoderLayer(Module):
    """Baseline layer on object queries only: self-attention, cross-attention at the reference, FFN."""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.dim = cfg.dim
        self.self_attn = MultiHeadSelfAttention(cfg.attention, rng)
        self.norm_self = LayerNorm(cfg.dim)
        self.cross = DeformableCrossAttention(cfg.attention, rng)
        self.norm_cross = LayerNorm(cfg.dim)
        self.ffn = FeedForward(cfg.dim, cfg.ffn_dim, rng)
        self.norm_ffn = LayerNorm(cfg.dim)

    def forward(self, x: Tensor, pos: Tensor, map_refs: np.ndarray, feature_map: Tensor) -> Tensor:
        """
        :param x: ``(N, dim)`` object contents.
        :param pos: ``(N, dim)`` positional embeddings of the references.
        :param map_refs: ``(N, 2)`` references in map coordinates.
        """

        x = self.norm_self(x + self.self_attn(x, pos))
        x = self.norm_cross(x + self.cross(x + pos, map_refs, feature_map))
        return self.norm_ffn(x + self.ffn(x))
