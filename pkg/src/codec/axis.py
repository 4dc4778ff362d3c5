"""Four-peak circular axis label.

A direction ``theta`` is discretised into ``n_bins`` bins of width
``360 / n_bins`` degrees. The label holds one Gaussian bump (width ``sigma``
bins) at each of the four directions ``theta + 90k``. Bumps are combined by
max, which is the same as measuring the distance to the nearest peak, so the
pattern is computed once over a quarter period and tiled four times. That
makes shifting the label by ``n_bins / 4`` an exact identity.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from model.axis import AxisDecode, AxisEncoding
from model.config import AxisCodecConfig
from utils.errors import LengthMismatch, NonFiniteLogits

_PHASE_STEP = 2.0 ** -24


def _peak_phase(theta: float, n_bins: int) -> float:
    """Return the peak position in bins, reduced to one quarter period."""

    quarter = n_bins // 4
    theta_deg = math.degrees(math.fmod(theta, 2.0 * math.pi))
    phase = (theta_deg * n_bins / 360.0) % quarter
    # quantised so directions equal up to rounding get identical labels
    return (round(phase / _PHASE_STEP) * _PHASE_STEP) % quarter


def encode_axis(theta: float, cfg: AxisCodecConfig) -> AxisEncoding:
    """Encode a direction as a four-peak circular soft label.

    :param theta: Direction in radians (any finite value, reduced mod ``2*pi``).
    :param cfg: Codec configuration.
    :return: :class:`AxisEncoding` of length ``cfg.n_bins`` with values in ``[0, 1]``.
    :raises ValueError: If ``theta`` is not finite.
    """

    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    quarter = cfg.n_bins // 4
    phase = _peak_phase(theta, cfg.n_bins)
    if cfg.sigma == 0:
        pattern = np.zeros(quarter)
        pattern[int(math.floor(phase + 0.5)) % quarter] = 1.0
    else:
        delta = np.mod(np.arange(quarter, dtype=np.float64) - phase, quarter)
        distance = np.minimum(delta, quarter - delta)
        pattern = np.exp(-(distance ** 2) / (2.0 * cfg.sigma ** 2))
    return AxisEncoding(np.tile(pattern, 4))


def encode_fixed_horizontal(cfg: AxisCodecConfig) -> AxisEncoding:
    """Label used when axes are fixed to the image axes (horizontal detection)."""

    return encode_axis(0.0, cfg)


def decode_axis(encoding: Union[AxisEncoding, np.ndarray]) -> AxisDecode:
    """Decode the principal direction of an axis label or logit vector.

    :param encoding: :class:`AxisEncoding` or raw vector of per-bin scores.
    :return: :class:`AxisDecode`; ties resolve to the lowest bin index.
    :raises LengthMismatch: If the vector is empty.
    :raises NonFiniteLogits: If any entry is NaN or infinite.
    """

    values = encoding.values if isinstance(encoding, AxisEncoding) else np.asarray(encoding, dtype=np.float64).reshape(-1)
    n_bins = values.shape[0]
    if n_bins == 0:
        raise LengthMismatch("axis vector is empty")
    if not np.all(np.isfinite(values)):
        raise NonFiniteLogits("axis vector contains NaN or infinite entries")

    index = int(np.argmax(values))
    bin_width = 2.0 * math.pi / n_bins
    principal = index * bin_width
    directions = tuple(math.fmod(principal + k * math.pi / 2.0, 2.0 * math.pi) for k in range(4))
    if n_bins % 4 == 0:
        box_angle = (index % (n_bins // 4)) * bin_width
    else:
        box_angle = math.fmod(principal, math.pi / 2.0)
    return AxisDecode(principal=principal, directions=directions, box_angle=box_angle, bin_index=index)
