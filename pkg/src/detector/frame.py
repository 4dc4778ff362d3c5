from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ImageFrame:
    """Coordinate frames of one image.

    Normalised coordinates divide pixels by ``scale = max(height, width)`` on
    both axes so angles are preserved. Map coordinates are ``[0, 1]^2`` over
    the area covered by whole patches and are what deformable attention samples.
    """

    height: int
    width: int
    map_height: int
    map_width: int
    patch_size: int

    @property
    def scale(self) -> float:
        return float(max(self.height, self.width))

    @property
    def map_extent(self) -> np.ndarray:
        p = self.patch_size
        return np.array([self.map_width * p, self.map_height * p], dtype=np.float64) / self.scale

    def cell_centers(self) -> np.ndarray:
        """Row-major ``(map_h * map_w, 2)`` cell centres in normalised coordinates."""

        p = self.patch_size
        ys, xs = np.meshgrid(np.arange(self.map_height), np.arange(self.map_width), indexing="ij")
        centers = np.stack([(xs + 0.5) * p, (ys + 0.5) * p], axis=-1).reshape(-1, 2)
        return centers / self.scale

    def to_map(self, points: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(points) / self.map_extent, 0.0, 1.0)
