"""Finite-difference checks of every analytic gradient: losses, tensor ops, attention blocks, the micro detector.

Losses and blocks are looked up through their modules at call time, so a
patched implementation is what gets checked.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

import nn.tensor as ops
from codec.axis import encode_axis
from detector.oriented_detr import OrientedDETR
from geometry.point_axis import box_to_point_axis_target
from losses import cross_axis, focal, point_axis, projection
from model.config import AttentionConfig, AxisCodecConfig, LossConfig, ModelConfig
from model.geometry import OrientedBox, PointAxisTarget
from model.prediction import PointSetPrediction
from model.records import PropertyResult
from nn import attention, encoding
from nn.gradcheck import check_module, check_tensor_gradients, numeric_gradient, relative_error
from nn.tensor import Tensor
from verify.common import DEFAULT_SEED, result, suite_rng

NAMESPACE = 1
EPS = 1e-5
TOLERANCE = 1e-4
MODEL_TOLERANCE = 1e-3
MARGIN = 1e-3

ATTENTION = AttentionConfig(dim=8, n_heads=2, n_sample_points=2)
CODEC = AxisCodecConfig(n_bins=16, sigma=1.0)


def _array_error(value_fn: Callable[[dict[str, np.ndarray]], float], arrays: dict[str, np.ndarray], analytic: dict[str, np.ndarray]) -> float:
    checked_analytic, checked_numeric = [], []
    for name, x in arrays.items():
        checked_numeric.append(numeric_gradient(lambda _: value_fn(arrays), x, EPS).reshape(-1))
        checked_analytic.append(analytic[name].reshape(-1))
    return relative_error(np.concatenate(checked_analytic), np.concatenate(checked_numeric))


def _random_target(rng: np.random.Generator, codec: AxisCodecConfig) -> PointAxisTarget:
    box = OrientedBox(
        cx=rng.uniform(-2.0, 2.0),
        cy=rng.uniform(-2.0, 2.0),
        w=rng.uniform(0.5, 2.0),
        h=rng.uniform(0.5, 2.0),
        theta=rng.uniform(0.0, math.pi),
    )
    return box_to_point_axis_target(box, codec)


def _smooth_points(rng: np.random.Generator, target: PointAxisTarget, n_points: int, top_k: int = 1) -> np.ndarray:
    """Points whose selected projections, signs and centre distance sit clear of any tie or kink."""

    spread = float(np.linalg.norm(target.radials, axis=1).max())
    while True:
        pts = target.center + rng.normal(scale=spread, size=(n_points, 2))
        proj = projection.edge_projections(pts, target)
        ordered = -np.sort(-proj, axis=0)
        gap = ordered[top_k - 1] - ordered[top_k]
        means = ordered[:top_k].mean(axis=0)
        if (
            gap.min() > MARGIN
            and np.abs(means).min() > MARGIN
            and np.abs(proj).min() > MARGIN
            and np.linalg.norm(pts[-1] - target.center) > MARGIN
        ):
            return pts


def projection_property(name: str, variant: str, top_k: int, trials: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(trials):
        target = _random_target(rng, CODEC)
        arrays = {"points": _smooth_points(rng, target, 9, top_k)}

        def value(a: dict[str, np.ndarray]) -> float:
            return projection.max_projection_variant(a["points"], target, variant, top_k).value

        analytic = projection.max_projection_variant(arrays["points"].copy(), target, variant, top_k).gradients
        errors.append(_array_error(value, arrays, analytic))
    return result(name, errors, TOLERANCE)


def cross_axis_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(trials):
        target = encode_axis(rng.uniform(0.0, 2.0 * math.pi), CODEC)
        arrays = {"axis_logits": rng.normal(scale=2.0, size=CODEC.n_bins)}

        def value(a: dict[str, np.ndarray]) -> float:
            return cross_axis.cross_axis_loss(a["axis_logits"], target, CODEC.epsilon).value

        analytic = cross_axis.cross_axis_loss(arrays["axis_logits"].copy(), target, CODEC.epsilon).gradients
        errors.append(_array_error(value, arrays, analytic))
    return result("cross_axis", errors, TOLERANCE)


def focal_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(trials):
        classes = rng.integers(-1, 3, size=4)
        arrays = {"class_logits": rng.normal(scale=2.0, size=(4, 3))}

        def value(a: dict[str, np.ndarray]) -> float:
            return focal.classification_loss(a["class_logits"], classes).value

        analytic = focal.classification_loss(arrays["class_logits"].copy(), classes).gradients
        errors.append(_array_error(value, arrays, analytic))
    return result("focal", errors, TOLERANCE)


def point_axis_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    cfg = LossConfig(codec=CODEC)
    n_queries, n_points, n_classes = 4, 7, 3
    matches = [(0, 1), (2, 0)]
    errors = []
    for _ in range(trials):
        targets = [_random_target(rng, CODEC) for _ in range(2)]
        target_classes = [int(c) for c in rng.integers(0, n_classes, size=2)]
        points = rng.normal(size=(n_queries, n_points, 2))
        for pred_index, target_index in matches:
            points[pred_index] = _smooth_points(rng, targets[target_index], n_points)
        arrays = {
            "points": points,
            "axis_logits": rng.normal(scale=2.0, size=(n_queries, CODEC.n_bins)),
            "class_logits": rng.normal(scale=2.0, size=(n_queries, n_classes)),
        }

        def value(a: dict[str, np.ndarray]) -> float:
            preds = [PointSetPrediction(a["points"][i], a["axis_logits"][i], a["class_logits"][i]) for i in range(n_queries)]
            return point_axis.point_axis_loss(preds, targets, target_classes, matches, cfg).value

        snapshot = {k: v.copy() for k, v in arrays.items()}
        preds = [PointSetPrediction(snapshot["points"][i], snapshot["axis_logits"][i], snapshot["class_logits"][i]) for i in range(n_queries)]
        analytic = point_axis.point_axis_loss(preds, targets, target_classes, matches, cfg).gradients
        errors.append(_array_error(value, arrays, analytic))
    return result("point_axis", errors, TOLERANCE)


def _away_from(rng: np.random.Generator, shape, kinks: tuple[float, ...], low: float, high: float, gap: float = 0.05) -> np.ndarray:
    x = rng.uniform(low, high, size=shape)
    for k in kinks:
        near = np.abs(x - k) < gap
        x[near] = k + np.where(x[near] >= k, gap, -gap)
    return x


def _bilinear_locations(rng: np.random.Generator, height: int, width: int, n: int) -> np.ndarray:
    px = rng.integers(-1, width, size=n) + rng.uniform(0.1, 0.9, size=n)
    py = rng.integers(-1, height, size=n) + rng.uniform(0.1, 0.9, size=n)
    return np.stack([(px + 0.5) / width, (py + 0.5) / height], axis=-1)


def _op_cases(rng: np.random.Generator) -> list[tuple[str, Callable[..., Tensor], list[np.ndarray]]]:
    n = rng.normal
    return [
        ("add", lambda a, b: a + b, [n(size=(3, 4)), n(size=4)]),
        ("sub", lambda a, b: a - b, [n(size=(3, 4)), n(size=(3, 1))]),
        ("mul", lambda a, b: a * b, [n(size=(3, 4)), n(size=(1, 4))]),
        ("div", lambda a, b: a / b, [n(size=(3, 4)), rng.choice([-1.0, 1.0], size=(3, 4)) * rng.uniform(0.5, 2.0, size=(3, 4))]),
        ("matmul", lambda a, b: a @ b, [n(size=(2, 3, 4)), n(size=(4, 2))]),
        ("sum", lambda a: a.sum(axis=1), [n(size=(3, 4))]),
        ("mean", lambda a: a.mean(axis=0, keepdims=True), [n(size=(3, 4))]),
        ("reshape_transpose", lambda a: a.reshape(4, 3).transpose(1, 0), [n(size=(3, 4))]),
        ("getitem", lambda a: a[1:, ::2], [n(size=(3, 4))]),
        ("take", lambda a: ops.take(a, [2, 0, 2], axis=0), [n(size=(3, 4))]),
        ("concat", lambda a, b: ops.concat([a, b], axis=1), [n(size=(3, 2)), n(size=(3, 3))]),
        ("stack", lambda a, b: ops.stack([a, b], axis=0), [n(size=(3, 2)), n(size=(3, 2))]),
        ("exp", ops.exp, [n(size=(3, 4))]),
        ("log", ops.log, [rng.uniform(0.5, 2.0, size=(3, 4))]),
        ("sin", ops.sin, [n(size=(3, 4))]),
        ("cos", ops.cos, [n(size=(3, 4))]),
        ("relu", ops.relu, [_away_from(rng, (3, 4), (0.0,), -1.0, 1.0)]),
        ("sigmoid", ops.sigmoid, [n(size=(3, 4))]),
        ("inverse_sigmoid", ops.inverse_sigmoid, [rng.uniform(0.1, 0.9, size=(3, 4))]),
        ("clip", lambda a: ops.clip(a, -0.5, 0.5), [_away_from(rng, (3, 4), (-0.5, 0.5), -1.0, 1.0)]),
        ("softmax", lambda a: ops.softmax(a, axis=-1), [n(size=(3, 4))]),
        ("layer_norm", ops.layer_norm, [n(size=(3, 5))]),
        ("bilinear_sample", ops.bilinear_sample, [n(size=(4, 5, 3)), _bilinear_locations(rng, 4, 5, 6)]),
        ("sinusoidal_pe", lambda c: encoding.sinusoidal_pe(c, 8), [rng.uniform(size=3)]),
    ]


def tensor_ops_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    errors, worst_op, worst = [], "", -1.0
    for _ in range(trials):
        for name, fn, inputs in _op_cases(rng):
            tensors = [Tensor(x.copy(), requires_grad=True) for x in inputs]
            readout = rng.normal(size=fn(*tensors).shape)
            error = check_tensor_gradients(lambda: (fn(*tensors) * readout).sum(), tensors, EPS)
            errors.append(error)
            if error > worst:
                worst_op, worst = name, error
    return result("tensor_ops", errors, TOLERANCE, detail=f"worst op: {worst_op}")


def self_attention_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    errors = []
    for _ in range(trials):
        module = attention.MultiHeadSelfAttention(ATTENTION, rng)
        x = Tensor(rng.normal(size=(2, 3, ATTENTION.dim)), requires_grad=True)
        errors.append(check_module(module, [x], EPS, max_entries=8, rng=rng))
    return result("self_attention", errors, TOLERANCE)


def _jitter(module, rng: np.random.Generator, scale: float) -> None:
    for p in module.parameters():
        p.data = p.data + rng.normal(scale=scale, size=p.shape)


def _clear_of_grid(locations: np.ndarray, height: int, width: int, margin: float = 0.01) -> bool:
    px = locations[..., 0] * width - 0.5
    py = locations[..., 1] * height - 0.5
    return float(min(np.abs(px - np.round(px)).min(), np.abs(py - np.round(py)).min())) > margin


def deformable_attention_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    height, width = 5, 6
    errors = []
    for _ in range(trials):
        query = Tensor(rng.normal(size=(2, ATTENTION.dim)), requires_grad=True)
        refs = Tensor(rng.uniform(0.2, 0.8, size=(2, 2)))
        value_map = Tensor(rng.normal(size=(height, width, ATTENTION.dim)), requires_grad=True)
        while True:
            module = attention.DeformableCrossAttention(ATTENTION, rng)
            _jitter(module, rng, 0.1)
            module(query, refs, value_map)
            if _clear_of_grid(module.last_locations, height, width):
                break
        errors.append(check_module(module, [query, refs, value_map], EPS, max_entries=8, rng=rng))
    return result("deformable_attention", errors, TOLERANCE)


def micro_model_property(trials: int, rng: np.random.Generator) -> PropertyResult:
    """Decoder and head parameters of a one-layer detector under a random read-out of its outputs.

    Upstream parameters also move the detached reference points, which the
    analytic gradient ignores by construction, so they are not checked here.
    """

    cfg = ModelConfig(
        K=5, N=2, dim=8, n_layers=1, n_classes=2, patch_size=4, ffn_dim=16, init_radius=0.1, attention=ATTENTION
    )
    codec = AxisCodecConfig(n_bins=8, sigma=1.0)
    errors = []
    for _ in range(trials):
        model = OrientedDETR(cfg, codec, seed=int(rng.integers(2 ** 31)))
        _jitter(model, rng, 0.05)
        image = rng.uniform(size=(16, 16, 3))
        head = model(image).layers[-1]
        weights = [rng.normal(size=t.shape) for t in (head.points, head.axis_logits, head.class_logits)]

        def loss() -> Tensor:
            out = model(image).layers[-1]
            return (
                (out.points * weights[0]).sum() + (out.axis_logits * weights[1]).sum() + (out.class_logits * weights[2]).sum()
            )

        params = [p for name, p in model.named_parameters() if name.startswith(("layers.", "heads."))]
        errors.append(check_tensor_gradients(loss, params, EPS, max_entries=4, rng=rng, kink_guard=True))
    return result("micro_model", errors, MODEL_TOLERANCE)


def run(trials: int = 100, seed: int = DEFAULT_SEED) -> list[PropertyResult]:
    """Run every gradient property with ``trials`` seeded configurations (the micro model uses a tenth)."""

    rng = suite_rng(seed, NAMESPACE)
    return [
        projection_property("max_projection", "max", 1, trials, rng),
        projection_property("max_projection_with_penalty", "with_penalty", 1, trials, rng),
        projection_property("max_projection_top2", "top_k", 2, trials, rng),
        projection_property("max_projection_top3", "top_k", 3, trials, rng),
        cross_axis_property(trials, rng),
        focal_property(trials, rng),
        point_axis_property(trials, rng),
        tensor_ops_property(trials, rng),
        self_attention_property(trials, rng),
        deformable_attention_property(trials, rng),
        micro_model_property(max(1, trials // 10), rng),
    ]
