"""Conversions between quads, point-axis targets and decoded boxes."""

from __future__ import annotations

import numpy as np

from codec.axis import decode_axis, encode_axis, encode_fixed_horizontal
from geometry.boxes import box_axes, canonical_box, min_area_rect, quad_to_obb
from model.config import AxisCodecConfig
from model.geometry import OrientedBox, PointAxisTarget, Quad
from model.prediction import PointSetPrediction
from utils.errors import InvalidK

MIN_EXTENT = 1e-9


def quad_to_point_axis_target(quad: Quad, codec_cfg: AxisCodecConfig) -> PointAxisTarget:
    """Turn an annotated quad into centre, radial vectors and axis label.

    The centre is the centre of the quad's minimum-area rectangle; radials are
    the perpendicular feet on its four edges, counter-clockwise from the ``w``
    axis; the axis label encodes the direction of the first radial.

    :param quad: Annotated quad.
    :param codec_cfg: Axis codec configuration.
    :return: :class:`PointAxisTarget` in pixel units.
    :raises DegenerateQuad: If the rectangle has a side below tolerance.
    """

    box = quad_to_obb(quad)
    return box_to_point_axis_target(box, codec_cfg)


def box_to_point_axis_target(box: OrientedBox, codec_cfg: AxisCodecConfig) -> PointAxisTarget:
    u, v = box_axes(box.theta)
    v1 = u * (box.w / 2.0)
    v2 = v * (box.h / 2.0)
    radials = np.stack([v1, v2, -v1, -v2])
    return PointAxisTarget(np.array([box.cx, box.cy]), radials, encode_axis(box.theta, codec_cfg))


def point_axis_corners(target: PointAxisTarget) -> np.ndarray:
    """Rectangle corners ``C -v1 -v2, C +v1 -v2, C +v1 +v2, C -v1 +v2``."""

    c, v1, v2 = target.center, target.radials[0], target.radials[1]
    return np.stack([c - v1 - v2, c + v1 - v2, c + v1 + v2, c - v1 + v2])


def decode_point_axis(pred: PointSetPrediction, codec_cfg: AxisCodecConfig, scale: float = 1.0) -> OrientedBox:
    """Build a box from predicted points and the decoded principal axis.

    The box axes are the decoded direction ``u`` and its normal; extents are the
    range of the K-1 boundary points projected on each axis. Predictions without
    axis logits (fixed-axis mode) decode with the horizontal label.

    :param pred: Prediction with K >= 5 points.
    :param codec_cfg: Axis codec configuration.
    :param scale: Factor mapping prediction coordinates to output units.
    :return: Canonical :class:`OrientedBox`.
    :raises InvalidK: If the prediction has fewer than 5 points.
    :raises NonFiniteLogits: If the axis logits are not finite.
    """

    if pred.K < 5:
        raise InvalidK(f"decoding needs K >= 5 points, got {pred.K}")
    logits = pred.axis_logits if pred.axis_logits is not None else encode_fixed_horizontal(codec_cfg).values
    phi = decode_axis(logits).box_angle
    u, v = box_axes(phi)
    boundary = pred.points[:-1] * scale
    pu, pv = boundary @ u, boundary @ v
    w = max(float(pu.max() - pu.min()), MIN_EXTENT)
    h = max(float(pv.max() - pv.min()), MIN_EXTENT)
    center = u * (pu.max() + pu.min()) / 2.0 + v * (pv.max() + pv.min()) / 2.0
    return canonical_box(center[0], center[1], w, h, phi)


def decode_min_area(pred: PointSetPrediction, scale: float = 1.0) -> OrientedBox:
    """Baseline decoder: minimum-area rectangle enclosing the boundary points.

    :raises DegeneratePointSet: If the boundary points are collinear.
    """

    return min_area_rect(pred.points[:-1] * scale)
