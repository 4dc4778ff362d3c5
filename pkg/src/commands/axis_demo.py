"""Print (and optionally dump) the four-peak axis label of one direction."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from codec.axis import decode_axis, encode_axis
from model.axis import AxisEncoding
from model.config import AxisCodecConfig
from utils.errors import InvalidConfig, UsageError
from utils.logger.logger import Logger


def format_encoding(encoding: AxisEncoding, threshold: float = 1e-3) -> str:
    """Bins whose value reaches ``threshold``, as ``bin:value`` pairs."""

    hot = np.flatnonzero(encoding.values >= threshold)
    return " ".join(f"{i}:{encoding.values[i]:.4f}" for i in hot)


def write_csv(path: Path, encoding: AxisEncoding) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    bins = np.arange(encoding.n_bins)
    frame = pd.DataFrame({"bin": bins, "degrees": bins * (360.0 / encoding.n_bins), "value": encoding.values})
    frame.to_csv(path, index=False)
    return path


async def run(
    *,
    theta: Optional[float],
    n_bins: int = 360,
    sigma: float = 6.0,
    csv_path: Optional[str] = None,
    logger: Logger,
) -> AxisEncoding:
    """Encode ``theta`` degrees, print the non-zero bins and the decoded direction.

    :param theta: Direction in degrees.
    :param csv_path: Optional CSV with one ``bin,degrees,value`` row per bin.
    :raises UsageError: If ``theta`` is missing or not finite, or the codec parameters are invalid.
    """

    if theta is None or not math.isfinite(theta):
        raise UsageError(f"--theta must be a finite number of degrees, got {theta}")
    try:
        cfg = AxisCodecConfig(n_bins=n_bins, sigma=sigma)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from exc

    encoding = encode_axis(math.radians(theta), cfg)
    decoded = decode_axis(encoding)
    logger.debug(f"encoded theta={theta} with n_bins={n_bins} sigma={sigma}")
    print(f"theta={theta:g} n_bins={cfg.n_bins} sigma={cfg.sigma:g}")
    print(f"encoding: {format_encoding(encoding)}")
    directions = ", ".join(f"{math.degrees(d):.4f}" for d in decoded.directions)
    print(f"principal={math.degrees(decoded.principal):.4f} directions=[{directions}] box_angle={math.degrees(decoded.box_angle):.4f}")
    if csv_path:
        written = write_csv(Path(csv_path), encoding)
        logger.info(f"wrote {cfg.n_bins} rows to {written}")
    return encoding
