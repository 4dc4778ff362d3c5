"""AdamW with decoupled weight decay, step learning-rate decay and global-norm clipping."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from model.config import OptimizerConfig
from nn.module import Parameter


def learning_rate(cfg: OptimizerConfig, epoch: int) -> float:
    """Base rate times ``decay_gamma`` for every decay epoch already reached."""

    return cfg.lr * cfg.decay_gamma ** sum(1 for e in cfg.decay_epochs if epoch >= e)


def clip_grad_norm(params: Sequence[Parameter], max_norm: float) -> float:
    """Scale gradients so their global L2 norm is at most ``max_norm`` (0 disables).

    :return: Norm before clipping.
    """

    grads = [p.grad for p in params if p.grad is not None]
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if max_norm > 0 and total > max_norm:
        factor = max_norm / (total + 1e-12)
        for p in params:
            if p.grad is not None:
                p.grad = p.grad * factor
    return total


class AdamW:
    def __init__(self, params: Sequence[Parameter], cfg: OptimizerConfig):
        self.params = list(params)
        self.cfg = cfg
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self, lr: float) -> None:
        """One update at learning rate ``lr``; parameters without a gradient only decay."""

        cfg = self.cfg
        self.step_count += 1
        bias1 = 1.0 - cfg.beta1 ** self.step_count
        bias2 = 1.0 - cfg.beta2 ** self.step_count
        for p, m, v in zip(self.params, self.m, self.v):
            p.data = p.data * (1.0 - lr * cfg.weight_decay)
            if p.grad is None:
                continue
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * p.grad
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * p.grad * p.grad
            p.data = p.data - lr * (m / bias1) / (np.sqrt(v / bias2) + cfg.eps)
