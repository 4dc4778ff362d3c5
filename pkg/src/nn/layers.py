"""Linear, MLP and layer-norm blocks."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from nn.module import Module, Parameter
from nn.tensor import Tensor, layer_norm, relu
from utils.errors import ShapeMismatch


class Linear(Module):
    """``x @ W + b`` with ``W`` of shape ``(in_dim, out_dim)``, init uniform(+-1/sqrt(in_dim))."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, bias: bool = True):
        bound = 1.0 / math.sqrt(in_dim)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = Parameter(rng.uniform(-bound, bound, size=(in_dim, out_dim)))
        self.bias: Optional[Parameter] = Parameter(rng.uniform(-bound, bound, size=out_dim)) if bias else None

    def reset_constant(self, weight: float = 0.0, bias: Optional[np.ndarray | float] = 0.0) -> "Linear":
        self.weight.data = np.full(self.weight.shape, weight, dtype=np.float64)
        if self.bias is not None:
            self.bias.data = np.broadcast_to(np.asarray(bias, dtype=np.float64), self.bias.shape).copy()
        return self

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.in_dim:
            raise ShapeMismatch(f"Linear expects last dim {self.in_dim}, got shape {x.shape}")
        out = x @ self.weight
        return out + self.bias if self.bias is not None else out


class MLP(Module):
    """Stack of ``num_layers`` linear layers with ReLU between them."""

    def __init__(self, in_dim: int, hidden_dim: int, out_dim: int, num_layers: int, rng: np.random.Generator):
        dims = [in_dim] + [hidden_dim] * (num_layers - 1) + [out_dim]
        self.layers = [Linear(a, b, rng) for a, b in zip(dims[:-1], dims[1:])]

    @property
    def last(self) -> Linear:
        return self.layers[-1]

    def forward(self, x: Tensor) -> Tensor:
        for i, layer in enumerate(self.layers):
            x = layer(x)
            if i < len(self.layers) - 1:
                x = relu(x)
        return x


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = 1e-5):
        self.eps = eps
        self.gamma = Parameter(np.ones(dim))
        self.beta = Parameter(np.zeros(dim))

    def forward(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.eps) * self.gamma + self.beta


class FeedForward(Module):
    """Two-layer ReLU block ``dim -> ffn_dim -> dim``."""

    def __init__(self, dim: int, ffn_dim: int, rng: np.random.Generator):
        self.linear1 = Linear(dim, ffn_dim, rng)
        self.linear2 = Linear(ffn_dim, dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        return self.linear2(relu(self.linear1(x)))
