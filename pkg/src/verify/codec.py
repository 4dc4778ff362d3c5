"""Axis codec oracles: roundtrip, 90-degree periodicity, seam continuity, square relabelling."""

from __future__ import annotations

import math

import numpy as np

from codec import axis
from geometry.point_axis import quad_to_point_axis_target
from losses import cross_axis, projection
from model.config import AxisCodecConfig
from model.geometry import Quad
from model.records import PropertyResult
from verify.common import DEFAULT_SEED, result, suite_rng

NAMESPACE = 3
DEFAULT_CODEC = AxisCodecConfig()


def _quarter_distance(a_deg: float, b_deg: float) -> float:
    d = (a_deg - b_deg) % 90.0
    return min(d, 90.0 - d)


def roundtrip_property(cfg: AxisCodecConfig, step_deg: float = 0.25) -> PropertyResult:
    half_bin = 180.0 / cfg.n_bins
    errors = []
    for theta_deg in np.arange(0.0, 360.0, step_deg):
        decoded = axis.decode_axis(axis.encode_axis(math.radians(theta_deg), cfg))
        errors.append(_quarter_distance(math.degrees(decoded.principal), theta_deg))
    return result("roundtrip_within_half_bin", errors, half_bin + 1e-9, detail=f"{len(errors)} angles, degrees modulo 90")


def periodicity_properties(cfg: AxisCodecConfig, trials: int, rng: np.random.Generator) -> list[PropertyResult]:
    quarter = cfg.n_bins // 4
    rolled, shifted = [], []
    for theta in rng.uniform(0.0, 2.0 * math.pi, size=trials):
        values = axis.encode_axis(theta, cfg).values
        rolled.append(0.0 if np.array_equal(np.roll(values, quarter), values) else 1.0)
        shifted.append(float(np.max(np.abs(axis.encode_axis(theta + math.pi / 2.0, cfg).values - values))))
    return [
        result("quarter_roll_identity", rolled, 0.0),
        result("quarter_turn_equivariance", shifted, 1e-9),
    ]


def seam_continuity_properties(cfg: AxisCodecConfig, trials: int, rng: np.random.Generator) -> list[PropertyResult]:
    """Label and cross-axis loss stay continuous through the 0 / 2*pi seam."""

    zero = axis.encode_axis(0.0, cfg).values
    label_jump = float(np.max(np.abs(axis.encode_axis(2.0 * math.pi - 1e-6, cfg).values - zero)))
    ratios = []
    angles = np.radians(np.arange(0, 3601) * 0.1)
    for _ in range(trials):
        logits = rng.normal(scale=2.0, size=cfg.n_bins)
        losses = np.array([cross_axis.cross_axis_loss(logits, axis.encode_axis(t, cfg), cfg.epsilon).value for t in angles])
        jumps = np.abs(np.diff(losses))
        ratios.append(float(jumps[-1] / max(jumps[:-1].max(), 1e-300)))
    return [
        result("label_seam_continuity", [label_jump], 1e-4),
        result("loss_seam_jump_ratio", ratios, 1.01, detail="seam step / largest interior step, 0.1 degree steps"),
    ]


def square_relabel_properties(cfg: AxisCodecConfig, trials: int, rng: np.random.Generator) -> list[PropertyResult]:
    """Cyclically relabelling a square's corners leaves its axis label and max-projection loss unchanged."""

    label_diffs, loss_diffs = [], []
    for _ in range(trials):
        center = rng.uniform(10.0, 50.0, size=2)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        half = rng.uniform(2.0, 8.0)
        u = np.array([math.cos(phi), math.sin(phi)]) * half
        v = np.array([-u[1], u[0]])
        corners = np.stack([center - u - v, center + u - v, center + u + v, center - u + v])
        points = center + rng.normal(scale=half, size=(9, 2))
        base = quad_to_point_axis_target(Quad(corners), cfg)
        base_loss = projection.max_projection_loss(points, base).value
        for shift in range(1, 4):
            target = quad_to_point_axis_target(Quad(np.roll(corners, shift, axis=0)), cfg)
            label_diffs.append(0.0 if np.array_equal(target.axis.values, base.axis.values) else 1.0)
            loss_diffs.append(abs(projection.max_projection_loss(points, target).value - base_loss))
    return [
        result("square_label_relabel_identity", label_diffs, 0.0),
        result("square_projection_relabel_invariance", loss_diffs, 1e-9),
    ]


def run(quick: bool = False, seed: int = DEFAULT_SEED) -> list[PropertyResult]:
    rng = suite_rng(seed, NAMESPACE)
    trials = 10 if quick else 100
    return [
        roundtrip_property(DEFAULT_CODEC, 1.0 if quick else 0.25),
        *periodicity_properties(DEFAULT_CODEC, trials, rng),
        *seam_continuity_properties(DEFAULT_CODEC, 2 if quick else 5, rng),
        *square_relabel_properties(DEFAULT_CODEC, trials, rng),
    ]
