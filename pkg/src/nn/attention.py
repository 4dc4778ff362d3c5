"""Multi-head self-attention and single-scale deformable cross-attention."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from model.config import AttentionConfig
from nn.layers import Linear
from nn.module import Module
from nn.tensor import Tensor, as_tensor, bilinear_sample, concat, softmax
from utils.errors import RefPointOutOfRange, ShapeMismatch


class MultiHeadSelfAttention(Module):
    """Scaled dot-product attention over the second-to-last axis.

    Queries and keys are projected from ``x + pos``, values from ``x``. Any
    leading axes are treated as independent groups, so an ``(N, K, dim)`` input
    attends within each of the N groups only.
    """

    def __init__(self, cfg: AttentionConfig, rng: np.random.Generator):
        self.dim = cfg.dim
        self.n_heads = cfg.n_heads
        self.head_dim = cfg.dim // cfg.n_heads
        self.q_proj = Linear(cfg.dim, cfg.dim, rng)
        self.k_proj = Linear(cfg.dim, cfg.dim, rng)
        self.v_proj = Linear(cfg.dim, cfg.dim, rng)
        self.out_proj = Linear(cfg.dim, cfg.dim, rng)
        self.last_weights: Optional[np.ndarray] = None

    def _split(self, t: Tensor) -> Tensor:
        lead = t.shape[:-2]
        n = t.shape[-2]
        t = t.reshape(lead + (n, self.n_heads, self.head_dim))
        axes = tuple(range(len(lead))) + (len(lead) + 1, len(lead), len(lead) + 2)
        return t.transpose(axes)

    def forward(self, x: Tensor, pos: Optional[Tensor] = None) -> Tensor:
        """
        :param x: ``(..., n, dim)`` tokens.
        :param pos: Optional positional embedding broadcastable to ``x``.
        :return: ``(..., n, dim)``.
        :raises ShapeMismatch: If the last axis is not ``dim`` or ``n == 0``.
        """

        x = as_tensor(x)
        if x.ndim < 2 or x.shape[-1] != self.dim or x.shape[-2] == 0:
            raise ShapeMismatch(f"self-attention expects (..., n>=1, {self.dim}), got {x.shape}")
        qk_in = x + pos if pos is not None else x
        q = self._split(self.q_proj(qk_in))
        k = self._split(self.k_proj(qk_in))
        v = self._split(self.v_proj(x))

        lead = len(x.shape) - 2
        k_t = k.transpose(tuple(range(lead + 1)) + (lead + 2, lead + 1))
        weights = softmax((q @ k_t) * (1.0 / math.sqrt(self.head_dim)), axis=-1)
        self.last_weights = weights.data
        heads = weights @ v
        merged = heads.transpose(tuple(range(lead)) + (lead + 1, lead, lead + 2)).reshape(x.shape)
        return self.out_proj(merged)


class DeformableCrossAttention(Module):
    """Single-scale deformable attention sampling a ``(H, W, dim)`` map around reference points.

    Per head, the query predicts ``n_sample_points`` offsets (in cells,
    normalised by ``(W, H)``) and softmax weights; the value-projected map is
    sampled bilinearly at ``ref + offset`` and the weighted samples are
    projected back to ``dim``.
    """

    def __init__(self, cfg: AttentionConfig, rng: np.random.Generator, offset_scale: float = 0.5):
        self.dim = cfg.dim
        self.n_heads = cfg.n_heads
        self.n_points = cfg.n_sample_points
        self.head_dim = cfg.dim // cfg.n_heads
        self.sampling_offsets = Linear(cfg.dim, cfg.n_heads * cfg.n_sample_points * 2, rng)
        self.attention_weights = Linear(cfg.dim, cfg.n_heads * cfg.n_sample_points, rng)
        self.value_proj = Linear(cfg.dim, cfg.dim, rng)
        self.output_proj = Linear(cfg.dim, cfg.dim, rng)

        thetas = np.arange(self.n_heads) * (2.0 * math.pi / self.n_heads)
        grid = np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)
        grid = grid / np.abs(grid).max(axis=-1, keepdims=True)
        grid = np.repeat(grid[:, None, :], self.n_points, axis=1) * (np.arange(self.n_points) + 1)[None, :, None]
        self.sampling_offsets.reset_constant(0.0, offset_scale * grid.reshape(-1))
        self.attention_weights.reset_constant(0.0, 0.0)
        self.last_locations: Optional[np.ndarray] = None

    def forward(self, query: Tensor, ref_points, value_map: Tensor) -> Tensor:
        """
        :param query: ``(Q, dim)`` or ``(dim,)``.
        :param ref_points: ``(Q, 2)`` or ``(2,)`` normalised reference points in ``[0, 1]``.
        :param value_map: ``(H, W, dim)`` feature map.
        :return: Same leading shape as ``query``.
        :raises RefPointOutOfRange: If a reference point leaves ``[0, 1]^2``.
        """

        query, ref = as_tensor(query), as_tensor(ref_points)
        single = query.ndim == 1
        if single:
            query, ref = query.reshape(1, self.dim), ref.reshape(1, 2)
        if query.shape[-1] != self.dim or ref.shape != (query.shape[0], 2):
            raise ShapeMismatch(f"deformable attention got query {query.shape} and refs {ref.shape}")
        if np.any(ref.data < 0.0) or np.any(ref.data > 1.0) or not np.all(np.isfinite(ref.data)):
            raise RefPointOutOfRange("reference points must lie in [0, 1]^2")
        value_map = as_tensor(value_map)
        height, width, channels = value_map.shape
        if channels != self.dim:
            raise ShapeMismatch(f"value map has {channels} channels, expected {self.dim}")

        n_queries = query.shape[0]
        value = self.value_proj(value_map).reshape(height, width, self.n_heads, self.head_dim)
        offsets = self.sampling_offsets(query).reshape(n_queries, self.n_heads, self.n_points, 2)
        locations = ref.reshape(n_queries, 1, 1, 2) + offsets * (1.0 / np.array([width, height], dtype=np.float64))
        self.last_locations = locations.data
        weights = softmax(self.attention_weights(query).reshape(n_queries, self.n_heads, self.n_points), axis=-1)

        heads = []
        for h in range(self.n_heads):
            sampled = bilinear_sample(value[:, :, h, :], locations[:, h])
            heads.append((sampled * weights[:, h].reshape(n_queries, self.n_points, 1)).sum(axis=1))
        out = self.output_proj(concat(heads, axis=-1))
        return out.reshape(self.dim) if single else out
