"""Sinusoidal positional encodings for normalised coordinates."""

from __future__ import annotations

import math

import numpy as np

from nn.tensor import ArrayLike, Tensor, as_tensor, concat, cos, sin, stack
from utils.errors import OddDimension, ShapeMismatch

TEMPERATURE = 10000.0


def _frequencies(dim: int) -> np.ndarray:
    if dim <= 0 or dim % 2 != 0:
        raise OddDimension(f"encoding width must be a positive even number, got {dim}")
    return 1.0 / TEMPERATURE ** (2.0 * np.arange(dim // 2) / dim)


def sinusoidal_pe(coordinate: ArrayLike, dim: int) -> Tensor:
    """Interleaved ``[sin(a_0), cos(a_0), sin(a_1), ...]`` with ``a_i = 2*pi*c / 10000^(2i/dim)``.

    :param coordinate: Tensor or array of normalised coordinates, any shape ``S``.
    :param dim: Even encoding width.
    :return: Tensor of shape ``S + (dim,)``; differentiable w.r.t. ``coordinate``.
    :raises OddDimension: If ``dim`` is odd.
    """

    freqs = _frequencies(dim)
    c = as_tensor(coordinate)
    angles = c.reshape(c.shape + (1,)) * (2.0 * math.pi * freqs)
    return stack([sin(angles), cos(angles)], axis=-1).reshape(c.shape + (dim,))


def position_embedding_2d(points: ArrayLike, dim: int) -> Tensor:
    """``concat(PE(x), PE(y))`` with each half of width ``dim / 2``.

    :param points: ``(..., 2)`` normalised ``(x, y)``.
    :param dim: Total width; ``dim / 2`` must be even.
    :return: ``(..., dim)`` tensor.
    """

    p = as_tensor(points)
    if p.shape[-1:] != (2,):
        raise ShapeMismatch(f"points must have trailing dimension 2, got {p.shape}")
    if dim % 2 != 0:
        raise OddDimension(f"2D embedding width must be even, got {dim}")
    return concat([sinusoidal_pe(p[..., 0], dim // 2), sinusoidal_pe(p[..., 1], dim // 2)], axis=-1)


def grid_position_embedding(height: int, width: int, dim: int) -> np.ndarray:
    """Constant ``(H, W, dim)`` embedding of cell centres."""

    ys = (np.arange(height) + 0.5) / height
    xs = (np.arange(width) + 0.5) / width
    grid = np.stack(np.meshgrid(xs, ys), axis=-1)
    return position_embedding_2d(grid, dim).data
