import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codec.axis import decode_axis, encode_axis, encode_fixed_horizontal
from model.config import AxisCodecConfig
from utils.errors import InvalidConfig, LengthMismatch, NonFiniteLogits

CODEC = AxisCodecConfig()


def test_sigma_zero_gives_four_unit_peaks(oracles):
    values = encode_axis(0.0, AxisCodecConfig(sigma=0.0)).values
    assert values.shape == (360,)
    assert np.flatnonzero(values).tolist() == oracles["codec"]["sigma_zero_peaks"]
    assert values.max() == 1.0


def test_decode_45_degrees(oracles):
    decoded = decode_axis(encode_axis(math.radians(45.0), CODEC))
    assert math.degrees(decoded.principal) == pytest.approx(oracles["codec"]["decode_45_degrees"])
    assert len(decoded.directions) == 4
    assert math.degrees(decoded.box_angle) == pytest.approx(45.0)


def test_label_is_bounded_with_four_equal_peaks():
    values = encode_axis(0.7, CODEC).values
    assert values.min() >= 0.0 and values.max() <= 1.0
    quarter = CODEC.n_bins // 4
    assert np.array_equal(values[:quarter], values[quarter : 2 * quarter])


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 2 * math.pi, exclude_max=True))
def test_quarter_roll_is_identity(theta):
    values = encode_axis(theta, CODEC).values
    assert np.array_equal(np.roll(values, CODEC.n_bins // 4), values)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 2 * math.pi, exclude_max=True))
def test_roundtrip_within_half_bin(theta):
    decoded = decode_axis(encode_axis(theta, CODEC))
    d = (math.degrees(decoded.principal) - math.degrees(theta)) % 90.0
    assert min(d, 90.0 - d) <= 0.5 + 1e-9


def test_seam_continuity():
    below = encode_axis(2 * math.pi - 1e-6, CODEC).values
    assert np.max(np.abs(below - encode_axis(0.0, CODEC).values)) < 1e-4


def test_fixed_horizontal_matches_zero_direction():
    assert np.array_equal(encode_fixed_horizontal(CODEC).values, encode_axis(0.0, CODEC).values)


def test_decode_ties_resolve_to_lowest_bin():
    assert decode_axis(np.ones(16)).bin_index == 0


def test_decode_rejects_bad_vectors():
    with pytest.raises(LengthMismatch):
        decode_axis(np.zeros(0))
    with pytest.raises(NonFiniteLogits):
        decode_axis(np.array([0.0, np.nan, 1.0, 0.0]))


def test_encode_rejects_non_finite_theta():
    with pytest.raises(ValueError):
        encode_axis(float("inf"), CODEC)


@pytest.mark.parametrize("kwargs", [{"n_bins": 30}, {"n_bins": 4}, {"sigma": -1.0}, {"epsilon": 0.0}])
def test_codec_config_validation(kwargs):
    with pytest.raises(InvalidConfig):
        AxisCodecConfig(**kwargs)
