"""Per-object query and prediction records exchanged with the detector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(eq=False)
class PointSetPrediction:
    """K normalised points (slot K is the centre), axis logits and class logits."""

    points: np.ndarray
    axis_logits: Optional[np.ndarray]
    class_logits: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if self.axis_logits is not None:
            self.axis_logits = np.asarray(self.axis_logits, dtype=np.float64).reshape(-1)
        self.class_logits = np.asarray(self.class_logits, dtype=np.float64).reshape(-1)

    @property
    def K(self) -> int:
        return int(self.points.shape[0])


@dataclass(eq=False)
class ObjectQuery:
    """Selected feature cell: content ``Q_o``, reference point and selection score."""

    content: np.ndarray
    ref_point: np.ndarray
    score: float


@dataclass(eq=False)
class PointQuery:
    """One of the K point queries conditioned on an object query.

    ``slot`` runs from 1 to K; slot K is the centre query.
    """

    content: np.ndarray
    positional: np.ndarray
    position: np.ndarray
    owner: int
    slot: int
