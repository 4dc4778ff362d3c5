"""Axis label types produced and consumed by the axis codec."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class AxisEncoding:
    """Circular four-peak label over ``n_bins`` direction bins, values in ``[0, 1]``."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)

    @property
    def n_bins(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class AxisDecode:
    """Decoded orientation.

    ``principal`` is the arg-max bin centre in radians, ``directions`` the four
    directions 90 degrees apart (each in ``[0, 2*pi)``), and ``box_angle`` the
    principal direction reduced to ``[0, pi/2)`` for box construction.
    """

    principal: float
    directions: tuple[float, float, float, float]
    box_angle: float
    bin_index: int
