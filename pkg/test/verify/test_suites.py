import math

import numpy as np
import pytest

import verify
from losses import cross_axis, projection
from model.loss import LossOutput
from model.records import PropertyResult
from utils.errors import UsageError
from verify import geom, grad
from verify.common import check, result, suite_rng
from verify.match import brute_force_assignment


@pytest.mark.parametrize("suite", ["geom", "codec", "match"])
def test_quick_suites_pass(suite):
    report = verify.run_suites([suite], quick=True, seed=7)
    assert report[suite]
    assert verify.failing(report) == [], verify.format_report(report)


def test_quick_gradient_properties_pass():
    rng = suite_rng(7, grad.NAMESPACE)
    outcomes = [
        grad.projection_property("max_projection", "max", 1, 5, rng),
        grad.projection_property("max_projection_top2", "top_k", 2, 5, rng),
        grad.cross_axis_property(5, rng),
        grad.focal_property(5, rng),
        grad.point_axis_property(5, rng),
    ]
    assert [o.name for o in outcomes if not o.passed] == []


def test_sign_flipped_gradient_is_caught(monkeypatch):
    original = cross_axis.cross_axis_loss

    def flipped(*args, **kwargs):
        out = original(*args, **kwargs)
        return LossOutput(out.value, {k: -v for k, v in out.gradients.items()}, out.terms)

    monkeypatch.setattr(cross_axis, "cross_axis_loss", flipped)
    outcome = grad.cross_axis_property(3, suite_rng(7, grad.NAMESPACE))
    assert not outcome.passed
    assert outcome.worst_error > grad.TOLERANCE


def test_geom_suite_covers_projection_semantics():
    names = [o.name for o in verify.run_suites(["geom"], quick=True, seed=3)["geom"]]
    assert {"projection_rotation_invariance", "projection_all_points_at_center", "projection_zero_set"} <= set(names)


def test_projection_offset_is_caught(monkeypatch):
    original = projection.max_projection_loss

    def offset(*args, **kwargs):
        out = original(*args, **kwargs)
        return LossOutput(out.value + 1e-6, out.gradients, out.terms)

    monkeypatch.setattr(projection, "max_projection_loss", offset)
    outcome = geom.projection_zero_set_property(3, suite_rng(7, geom.NAMESPACE))
    assert not outcome.passed


def test_resolve_suites():
    assert verify.resolve_suites("all") == ["grad", "geom", "codec", "match"]
    assert verify.resolve_suites("codec") == ["codec"]
    with pytest.raises(UsageError):
        verify.resolve_suites("speed")


def test_result_folds_errors():
    assert result("p", [0.1, 0.3], 0.5).worst_error == 0.3
    assert not result("p", [0.1, 0.6], 0.5).passed
    assert not result("p", [math.nan], 1.0).passed
    assert result("p", [], 0.0).passed
    assert check("fixture", False).worst_error == 1.0


def test_format_report_and_failing():
    report = {
        "grad": [PropertyResult("cross_axis", True, 2e-7, 1e-4, 100)],
        "match": [PropertyResult("hungarian_3x3_fixture", False, 1.0, 0.0, 1, "pairs differ")],
    }
    text = verify.format_report(report)
    lines = text.splitlines()
    assert lines[0] == "PASS grad.cross_axis worst=2.000e-07 tol=1.0e-04 trials=100"
    assert lines[1] == "FAIL match.hungarian_3x3_fixture worst=1.000e+00 tol=0.0e+00 trials=1 pairs differ"
    assert lines[-1] == "1/2 properties passed, max gradient error 2.000e-07"
    assert verify.failing(report) == ["hungarian_3x3_fixture"]


def test_brute_force_assignment_handles_tall_matrices():
    assert brute_force_assignment(np.array([[1.0], [0.5], [3.0]])) == 0.5
