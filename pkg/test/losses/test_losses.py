import math

import numpy as np
import pytest

from codec.axis import encode_axis
from losses.cross_axis import cross_axis_loss
from losses.focal import BACKGROUND, classification_loss
from losses.point_axis import point_axis_loss
from losses.projection import edge_projections, max_projection_loss, max_projection_variant
from model.axis import AxisEncoding
from model.config import AxisCodecConfig, LossConfig
from model.geometry import PointAxisTarget
from model.prediction import PointSetPrediction
from utils.errors import DegenerateTarget, EmptyBatch, IndexOutOfRange, InvalidK, LengthMismatch

CODEC = AxisCodecConfig(n_bins=16, sigma=1.0)
CORNERS = np.array([[2.0, 1.0], [-2.0, 1.0], [-2.0, -1.0], [2.0, -1.0]])


@pytest.fixture
def target() -> PointAxisTarget:
    radials = np.array([[2.0, 0.0], [0.0, 1.0], [-2.0, 0.0], [0.0, -1.0]])
    return PointAxisTarget(np.zeros(2), radials, encode_axis(0.0, CODEC))


def _points(scale: float) -> np.ndarray:
    return np.concatenate([CORNERS * scale, [[0.0, 0.0]]])


def test_points_on_the_corners_cost_nothing(target):
    out = max_projection_loss(_points(1.0), target)
    assert out.value == pytest.approx(0.0, abs=1e-12)
    assert np.max(edge_projections(_points(1.0), target)) == pytest.approx(0.0, abs=1e-12)


def test_shrunk_points_pay_their_gap(target):
    assert max_projection_loss(_points(0.5), target).value == pytest.approx(3.0)
    assert max_projection_variant(_points(0.5), target, "top_k", top_k=2).value == pytest.approx(3.0)


def test_penalty_adds_positive_projections(target):
    plain = max_projection_variant(_points(2.0), target, "max")
    penalised = max_projection_variant(_points(2.0), target, "with_penalty")
    assert plain.value == pytest.approx(6.0)
    assert penalised.terms["penalty"] == pytest.approx(12.0)
    assert penalised.value == pytest.approx(18.0)


def test_centre_term(target):
    points = _points(1.0)
    points[-1] = [3.0, 4.0]
    out = max_projection_loss(points, target)
    assert out.terms["center"] == pytest.approx(5.0)
    assert out.gradients["points"][-1] == pytest.approx([0.6, 0.8])


def test_all_points_at_centre_cost_the_radial_lengths(target):
    assert max_projection_loss(np.zeros((13, 2)), target).value == pytest.approx(6.0, abs=1e-12)
    unit = PointAxisTarget(np.array([1.0, 1.0]), np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]), target.axis)
    assert max_projection_loss(np.ones((5, 2)), unit).value == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("angle", [0.3, 1.0, 2.5, -2.0])
def test_rotating_everything_leaves_the_loss_unchanged(target, angle):
    rng = np.random.default_rng(11)
    shifted = PointAxisTarget(target.center + [1.5, -0.5], target.radials, target.axis)
    points = shifted.center + rng.normal(scale=1.5, size=(9, 2))
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    turned = PointAxisTarget(rot @ shifted.center, shifted.radials @ rot.T, shifted.axis)
    before = max_projection_loss(points, shifted).value
    assert max_projection_loss(points @ rot.T, turned).value == pytest.approx(before, abs=1e-9)


def _inside_and_touching(points, target) -> bool:
    proj = edge_projections(points, target)
    return bool(np.all(proj <= 1e-12) and np.all(proj.max(axis=0) >= -1e-12) and np.allclose(points[-1], target.center))


TOUCHING = np.array([[2.0, 0.5], [-1.0, 1.0], [-2.0, -0.3], [0.5, -1.0], [0.3, 0.2], [0.0, 0.0]])


@pytest.mark.parametrize(
    ("moved", "expected"),
    [
        (None, 0.0),
        ({0: [2.2, 0.5]}, 0.2),
        ({0: [1.8, 0.5]}, 0.2),
        ({3: [0.5, -0.7]}, 0.3),
        ({4: [0.3, 1.4]}, 0.4),
        ({5: [0.3, 0.4]}, 0.5),
    ],
)
def test_zero_loss_exactly_when_inside_and_every_edge_touched(target, moved, expected):
    points = TOUCHING.copy()
    for index, value in (moved or {}).items():
        points[index] = value
    value = max_projection_loss(points, target).value
    assert value == pytest.approx(expected, abs=1e-12)
    assert (value <= 1e-12) == _inside_and_touching(points, target)


def test_random_point_sets_are_never_free(target):
    rng = np.random.default_rng(5)
    for _ in range(50):
        points = rng.normal(scale=1.5, size=(7, 2))
        value = max_projection_loss(points, target).value
        assert value > 0.0
        assert not _inside_and_touching(points, target)


def test_projection_errors(target):
    with pytest.raises(InvalidK):
        max_projection_loss(np.zeros((4, 2)), target)
    with pytest.raises(InvalidK):
        max_projection_variant(_points(1.0), target, "top_k", top_k=5)
    flat = PointAxisTarget(np.zeros(2), np.zeros((4, 2)), target.axis)
    with pytest.raises(DegenerateTarget):
        max_projection_loss(_points(1.0), flat)


def test_cross_axis_at_zero_logits():
    label = encode_axis(0.3, CODEC)
    out = cross_axis_loss(np.zeros(16), label)
    assert out.value == pytest.approx(math.log(2.0))
    assert out.gradients["axis_logits"] == pytest.approx((0.5 - label.values) / 16)


def test_cross_axis_is_floored_for_confident_mistakes():
    label = AxisEncoding(np.ones(16))
    out = cross_axis_loss(np.full(16, -100.0), label, epsilon=1e-7)
    assert out.value == pytest.approx(-math.log(1e-7))
    assert np.all(out.gradients["axis_logits"] == 0.0)


def test_cross_axis_length_mismatch():
    with pytest.raises(LengthMismatch):
        cross_axis_loss(np.zeros(8), encode_axis(0.0, CODEC))


def test_focal_background_value():
    out = classification_loss(np.zeros((1, 1)), [BACKGROUND], alpha=0.25, gamma=2.0)
    assert out.value == pytest.approx(0.75 * 0.25 * math.log(2.0))


def test_focal_normalised_by_positive_count():
    logits = np.zeros((4, 2))
    one = classification_loss(logits, [0, -1, -1, -1])
    two = classification_loss(logits, [0, 1, -1, -1])
    per_positive = 0.25 * 0.25 * math.log(2.0)
    per_negative = 0.75 * 0.25 * math.log(2.0)
    assert one.value == pytest.approx(per_positive + 7 * per_negative)
    assert two.value == pytest.approx((2 * per_positive + 6 * per_negative) / 2)


def test_focal_rejects_bad_class_ids():
    with pytest.raises(IndexOutOfRange):
        classification_loss(np.zeros((2, 3)), [0, 3])
    with pytest.raises(IndexOutOfRange):
        classification_loss(np.zeros((2, 3)), [0, -2])


def _prediction(rng, points) -> PointSetPrediction:
    return PointSetPrediction(points, rng.normal(size=16), rng.normal(size=2))


def test_point_axis_loss_combines_terms(target):
    rng = np.random.default_rng(0)
    preds = [_prediction(rng, _points(0.5)), _prediction(rng, _points(3.0)), _prediction(rng, _points(1.0))]
    cfg = LossConfig(codec=CODEC)
    out = point_axis_loss(preds, [target], [1], [(0, 0)], cfg)
    assert out.terms["proj"] == pytest.approx(3.0)
    expected = cfg.lambda1 * out.terms["proj"] + cfg.lambda2 * out.terms["ca"] + cfg.cls_weight * out.terms["cls"]
    assert out.value == pytest.approx(expected)
    assert out.gradients["points"].shape == (3, 5, 2)
    assert np.all(out.gradients["points"][1:] == 0.0)
    assert np.all(out.gradients["axis_logits"][1:] == 0.0)
    assert np.any(out.gradients["class_logits"][1:] != 0.0)


def test_point_axis_loss_without_axis_logits(target):
    preds = [PointSetPrediction(_points(0.5), None, np.zeros(2))]
    out = point_axis_loss(preds, [target], [0], [(0, 0)], LossConfig(codec=CODEC))
    assert "axis_logits" not in out.gradients
    assert out.terms["ca"] == 0.0


def test_point_axis_loss_errors(target):
    rng = np.random.default_rng(1)
    preds = [_prediction(rng, _points(1.0))]
    with pytest.raises(EmptyBatch):
        point_axis_loss(preds, [target], [0], [], LossConfig(codec=CODEC))
    with pytest.raises(IndexOutOfRange):
        point_axis_loss(preds, [target], [0], [(0, 1)], LossConfig(codec=CODEC))
