"""Dataset, detection, evaluation and verification records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from model.geometry import OrientedBox, Quad
from utils.errors import InvalidConfig


@dataclass(eq=False)
class Annotation:
    """One DOTA object line: quad corners, category and difficulty flag."""

    quad: Quad
    category: str
    difficult: int = 0

    def __post_init__(self):
        if not self.category:
            raise ValueError("annotation category must be non-empty")
        if self.difficult not in (0, 1):
            raise ValueError(f"difficult must be 0 or 1, got {self.difficult}")


@dataclass(frozen=True)
class SceneParams:
    """Synthetic scene generator parameters."""

    n_images: int = 8
    height: int = 64
    width: int = 64
    max_objects: int = 4
    size_range: Tuple[float, float] = (14.0, 30.0)
    aspect_range: Tuple[float, float] = (1.0, 2.5)
    classes: Tuple[str, ...] = ("plane", "ship", "vehicle")
    max_iou: float = 0.3
    max_attempts: int = 1000

    def __post_init__(self):
        if self.n_images < 0 or self.max_objects < 1:
            raise InvalidConfig("n_images >= 0 and max_objects >= 1 required")
        if self.height < 1 or self.width < 1:
            raise InvalidConfig("image size must be positive")
        lo, hi = self.size_range
        if not 0 < lo <= hi:
            raise InvalidConfig(f"size_range must satisfy 0 < lo <= hi, got {self.size_range}")
        alo, ahi = self.aspect_range
        if not 1.0 <= alo <= ahi:
            raise InvalidConfig(f"aspect_range must satisfy 1 <= lo <= hi, got {self.aspect_range}")
        if not self.classes:
            raise InvalidConfig("at least one class is required")


@dataclass(eq=False)
class SyntheticScene:
    image: np.ndarray
    annotations: list[Annotation]
    seed: int
    scene_id: str


@dataclass(frozen=True)
class DetectionRecord:
    """One decoded detection; ``score`` lies in ``[0, 1]``."""

    image_id: str
    category: str
    score: float
    box: OrientedBox

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score}")


@dataclass(frozen=True)
class GroundTruthRecord:
    image_id: str
    category: str
    box: OrientedBox
    difficult: int = 0


@dataclass
class APResult:
    """Per-class AP, their mean over classes present in ground truth, and run parameters."""

    per_class: dict[str, float]
    mean_ap: float
    protocol: str
    iou_threshold: float
    n_ground_truth: dict[str, int] = field(default_factory=dict)
    n_detections: int = 0


@dataclass
class EpochMetrics:
    """One line of the training metrics stream."""

    epoch: int
    loss: float
    loss_proj: float
    loss_ca: float
    loss_cls: float
    loss_enc: float
    mAP50: Optional[float]
    mAP75: Optional[float]
    val_mAP50: Optional[float]
    wall_ms: float


@dataclass
class PropertyResult:
    """Outcome of one verification property with its worst observed error."""

    name: str
    passed: bool
    worst_error: float
    tolerance: float
    trials: int
    detail: str = ""


@dataclass
class DotaFile:
    """Parsed annotation file: header values keyed by name (``imagesource``, ``gsd``) and objects in file order."""

    annotations: list[Annotation]
    metadata: dict[str, str] = field(default_factory=dict)
