"""Configuration dataclasses for the codec, losses, network, optimiser and training loop.

Every config validates its own invariants in ``__post_init__`` and raises
:class:`utils.errors.InvalidConfig`. ``configs.run_config`` builds them from a
flat YAML mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

from utils.errors import InvalidConfig

PROJECTION_VARIANTS = ("max", "with_penalty", "top_k")


@dataclass(frozen=True)
class AxisCodecConfig:
    """Bin count, Gaussian width (in bins) and BCE clamp of the axis label."""

    n_bins: int = 360
    sigma: float = 6.0
    epsilon: float = 1e-7

    def __post_init__(self):
        if self.n_bins < 8 or self.n_bins % 4 != 0:
            raise InvalidConfig(f"n_bins must be >= 8 and divisible by 4, got {self.n_bins}")
        if self.sigma < 0:
            raise InvalidConfig(f"sigma must be >= 0, got {self.sigma}")
        if not 0.0 < self.epsilon < 0.5:
            raise InvalidConfig(f"epsilon must lie in (0, 0.5), got {self.epsilon}")


@dataclass(frozen=True)
class LossConfig:
    """Weights and variant selection for the combined point-axis loss.

    ``variant`` is one of ``max``, ``with_penalty`` or ``top_k`` (``top_k`` uses
    ``top_k`` projections per direction). ``aux_loss`` supervises every decoder
    layer; ``enc_weight`` scales the focal loss on encoder cell scores.
    """

    lambda1: float = 5.0
    lambda2: float = 1.0
    cls_weight: float = 2.0
    variant: str = "max"
    top_k: int = 1
    focal_alpha: float = 0.25
    focal_gamma: float = 2.0
    enc_weight: float = 1.0
    aux_loss: bool = True
    codec: AxisCodecConfig = field(default_factory=AxisCodecConfig)

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "cls_weight", "enc_weight", "focal_gamma"):
            if getattr(self, name) < 0:
                raise InvalidConfig(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.variant not in PROJECTION_VARIANTS:
            raise InvalidConfig(f"variant must be one of {PROJECTION_VARIANTS}, got {self.variant!r}")
        if self.top_k < 1:
            raise InvalidConfig(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 <= self.focal_alpha <= 1.0:
            raise InvalidConfig(f"focal_alpha must lie in [0, 1], got {self.focal_alpha}")


@dataclass(frozen=True)
class AttentionConfig:
    dim: int = 64
    n_heads: int = 4
    n_sample_points: int = 4

    def __post_init__(self):
        if min(self.dim, self.n_heads, self.n_sample_points) <= 0:
            raise InvalidConfig("attention dim, n_heads and n_sample_points must be positive")
        if self.dim % self.n_heads != 0:
            raise InvalidConfig(f"dim {self.dim} is not divisible by n_heads {self.n_heads}")


@dataclass(frozen=True)
class ModelConfig:
    """Shape of the toy Oriented-DETR and its decoder ablation switches.

    ``use_group_self_attention`` and ``use_decoupled_cross_attention`` only make
    sense with point queries. ``dim`` must be a multiple of 4 because a 2D
    position embeds as two 1D sinusoidal halves of interleaved sin/cos pairs.
    """

    K: int = 13
    N: int = 30
    dim: int = 64
    n_layers: int = 2
    n_classes: int = 3
    patch_size: int = 8
    in_channels: int = 3
    ffn_dim: int = 128
    encoder_layers: int = 0
    init_radius: float = 0.05
    attention: AttentionConfig = field(default_factory=AttentionConfig)
    use_point_queries: bool = True
    use_group_self_attention: bool = True
    use_decoupled_cross_attention: bool = True
    fixed_axis_mode: bool = False

    def __post_init__(self):
        if self.K < 5:
            raise InvalidConfig(f"K must be >= 5, got {self.K}")
        if self.N < 1:
            raise InvalidConfig(f"N must be >= 1, got {self.N}")
        if self.n_layers < 1 or self.n_classes < 1 or self.patch_size < 1 or self.ffn_dim < 1:
            raise InvalidConfig("n_layers, n_classes, patch_size and ffn_dim must be positive")
        if self.encoder_layers not in (0, 1):
            raise InvalidConfig(f"encoder_layers must be 0 or 1, got {self.encoder_layers}")
        if self.dim % 4 != 0:
            raise InvalidConfig(f"dim must be a multiple of 4, got {self.dim}")
        if self.attention.dim != self.dim:
            raise InvalidConfig(f"attention.dim {self.attention.dim} != dim {self.dim}")
        if not self.use_point_queries and (
            self.use_group_self_attention or self.use_decoupled_cross_attention
        ):
            raise InvalidConfig(
                "use_group_self_attention and use_decoupled_cross_attention require use_point_queries"
            )


@dataclass(frozen=True)
class OptimizerConfig:
    """AdamW with decoupled weight decay, step decay at ``decay_epochs`` and norm clipping."""

    lr: float = 1e-3
    weight_decay: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    decay_epochs: Tuple[int, ...] = (225, 275)
    decay_gamma: float = 0.1
    grad_clip: float = 1.0

    def __post_init__(self):
        if self.lr <= 0:
            raise InvalidConfig(f"lr must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise InvalidConfig("betas must lie in [0, 1)")
        if self.weight_decay < 0 or self.eps <= 0 or self.decay_gamma <= 0 or self.grad_clip < 0:
            raise InvalidConfig("weight_decay, eps, decay_gamma and grad_clip out of range")
        if list(self.decay_epochs) != sorted(self.decay_epochs):
            raise InvalidConfig(f"decay_epochs must be ascending, got {list(self.decay_epochs)}")


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    epochs: int = 300
    batch_size: int = 2
    eval_every: int = 10
    threads: int = 1

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1 or self.eval_every < 1 or self.threads < 1:
            raise InvalidConfig("epochs >= 0, batch_size, eval_every and threads >= 1 required")


@dataclass(frozen=True)
class RunConfig:
    """Everything one training or evaluation run needs."""

    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def codec(self) -> AxisCodecConfig:
        return self.loss.codec
