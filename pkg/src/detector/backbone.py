"""Patch-embedding feature stand-in with an optional single encoder layer."""

from __future__ import annotations

import numpy as np

from model.config import ModelConfig
from nn.attention import MultiHeadSelfAttention
from nn.encoding import grid_position_embedding
from nn.layers import FeedForward, LayerNorm, Linear
from nn.module import Module
from nn.tensor import Tensor
from utils.errors import ShapeMismatch, TooSmallInput


class PatchEmbedding(Module):
    """Non-overlapping ``p x p`` patches, one shared linear map, plus 2D sinusoidal positions.

    Pixels beyond the last whole patch are dropped.
    """

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.patch_size = cfg.patch_size
        self.in_channels = cfg.in_channels
        self.dim = cfg.dim
        self.proj = Linear(cfg.patch_size * cfg.patch_size * cfg.in_channels, cfg.dim, rng)

    def patches(self, image: np.ndarray) -> np.ndarray:
        img = np.asarray(image, dtype=np.float64)
        if img.ndim != 3 or img.shape[2] != self.in_channels:
            raise ShapeMismatch(f"image must be (H, W, {self.in_channels}), got {img.shape}")
        p = self.patch_size
        if img.shape[0] < p or img.shape[1] < p:
            raise TooSmallInput(f"image {img.shape[:2]} is smaller than one {p}x{p} patch")
        h, w = img.shape[0] // p, img.shape[1] // p
        cropped = img[: h * p, : w * p]
        return cropped.reshape(h, p, w, p, self.in_channels).transpose(0, 2, 1, 3, 4).reshape(h, w, p * p * self.in_channels)

    def forward(self, image: np.ndarray) -> Tensor:
        """
        :param image: ``(H_img, W_img, channels)`` array.
        :return: ``(H_img // p, W_img // p, dim)`` feature map.
        :raises TooSmallInput: If the image is smaller than one patch.
        """

        patches = self.patches(image)
        h, w, _ = patches.shape
        return self.proj(Tensor(patches)) + grid_position_embedding(h, w, self.dim)


class EncoderLayer(Module):
    """Plain post-norm self-attention layer over all feature cells."""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.attn = MultiHeadSelfAttention(cfg.attention, rng)
        self.norm1 = LayerNorm(cfg.dim)
        self.ffn = FeedForward(cfg.dim, cfg.ffn_dim, rng)
        self.norm2 = LayerNorm(cfg.dim)

    def forward(self, feature_map: Tensor) -> Tensor:
        h, w, dim = feature_map.shape
        tokens = feature_map.reshape(h * w, dim)
        pos = grid_position_embedding(h, w, dim).reshape(h * w, dim)
        tokens = self.norm1(tokens + self.attn(tokens, Tensor(pos)))
        tokens = self.norm2(tokens + self.ffn(tokens))
        return tokens.reshape(h, w, dim)
