"""Max-projection loss and its penalty / top-k variants.

For target radials ``v_j`` (unit directions ``u_j``) and predicted points
``p_m`` with ``d_m = p_m - C``, the signed distance of point ``m`` beyond edge
``j`` is ``proj[m, j] = d_m . u_j - |v_j|``. The loss sums, per edge, the
absolute extremal projection over the K-1 boundary points and adds the centre
distance ``|d_K|``.
"""

from __future__ import annotations

import numpy as np

from model.geometry import PointAxisTarget
from model.loss import LossOutput
from utils.errors import DegenerateTarget, InvalidK

MIN_RADIAL = 1e-9


def _validated(points, target: PointAxisTarget) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 5:
        raise InvalidK(f"need K >= 5 points, got {pts.shape[0]}")
    norms = np.linalg.norm(target.radials, axis=1)
    if np.any(norms < MIN_RADIAL):
        raise DegenerateTarget(f"radial vector shorter than {MIN_RADIAL}: norms={norms.tolist()}")
    return pts, target.radials / norms[:, None], norms


def edge_projections(points, target: PointAxisTarget) -> np.ndarray:
    """Signed distances ``(K-1, 4)`` of each boundary point beyond each target edge."""

    pts, units, norms = _validated(points, target)
    offsets = pts[:-1] - target.center
    return offsets @ units.T - norms[None, :]


def _center_term(pts: np.ndarray, target: PointAxisTarget, grad: np.ndarray) -> float:
    d = pts[-1] - target.center
    dist = float(np.linalg.norm(d))
    if dist > 0.0:
        grad[-1] += d / dist
    return dist


def max_projection_variant(points, target: PointAxisTarget, variant: str = "max", top_k: int = 1) -> LossOutput:
    """Max-projection loss under one of the ``max``, ``with_penalty`` or ``top_k`` variants.

    ``top_k`` averages the k largest projections per edge (stable order, so
    equal projections favour the lower point index) before taking the absolute
    value. ``with_penalty`` adds the positive part of every boundary point's
    projection beyond every edge.

    :param points: ``(K, 2)`` predicted points, the last one being the centre.
    :param target: Matched point-axis target in the same units.
    :param variant: ``max``, ``with_penalty`` or ``top_k``.
    :param top_k: Number of projections averaged per edge for ``top_k``.
    :return: :class:`LossOutput` with gradient ``points`` of shape ``(K, 2)``.
    :raises DegenerateTarget: If a radial vector has (near) zero length.
    :raises InvalidK: If ``K < 5`` or ``top_k`` exceeds the boundary point count.
    """

    pts, units, norms = _validated(points, target)
    n_boundary = pts.shape[0] - 1
    k = top_k if variant == "top_k" else 1
    if k < 1 or k > n_boundary:
        raise InvalidK(f"top_k must lie in [1, {n_boundary}], got {k}")

    proj = (pts[:-1] - target.center) @ units.T - norms[None, :]
    grad = np.zeros_like(pts)
    edge_total = 0.0
    for j in range(4):
        order = np.argsort(-proj[:, j], kind="stable")[:k]
        mean = float(proj[order, j].mean())
        edge_total += abs(mean)
        grad[order] += np.sign(mean) * units[j] / k

    penalty = 0.0
    if variant == "with_penalty":
        outside = proj > 0.0
        penalty = float(proj[outside].sum())
        grad[:-1] += outside.astype(np.float64) @ units

    center = _center_term(pts, target, grad)
    return LossOutput(
        value=edge_total + penalty + center,
        gradients={"points": grad},
        terms={"edges": edge_total, "penalty": penalty, "center": center},
    )


def max_projection_loss(points, target: PointAxisTarget) -> LossOutput:
    """Plain max-projection loss; see :func:`max_projection_variant`."""

    return max_projection_variant(points, target, "max")
