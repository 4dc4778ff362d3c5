import math

import numpy as np
import pytest

from model.config import AttentionConfig
from nn.attention import DeformableCrossAttention, MultiHeadSelfAttention
from nn.encoding import grid_position_embedding, position_embedding_2d, sinusoidal_pe
from nn.layers import MLP, LayerNorm, Linear
from nn.tensor import Tensor
from utils.errors import CheckpointMismatch, OddDimension, RefPointOutOfRange, ShapeMismatch
from verify.common import suite_rng
from verify import grad

CFG = AttentionConfig(dim=8, n_heads=2, n_sample_points=2)


def test_mlp_parameter_names_are_dotted_and_ordered():
    mlp = MLP(4, 8, 2, 3, np.random.default_rng(0))
    names = [name for name, _ in mlp.named_parameters()]
    assert names == [
        "layers.0.weight",
        "layers.0.bias",
        "layers.1.weight",
        "layers.1.bias",
        "layers.2.weight",
        "layers.2.bias",
    ]


def test_state_dict_roundtrip_and_mismatch():
    a = Linear(3, 2, np.random.default_rng(0))
    b = Linear(3, 2, np.random.default_rng(1))
    b.load_state_dict(a.state_dict())
    assert np.array_equal(a.weight.data, b.weight.data)
    with pytest.raises(CheckpointMismatch):
        b.load_state_dict({"weight": np.zeros((3, 2))})
    with pytest.raises(CheckpointMismatch):
        b.load_state_dict({"weight": np.zeros((2, 2)), "bias": np.zeros(2)})


def test_linear_rejects_wrong_width():
    with pytest.raises(ShapeMismatch):
        Linear(3, 2, np.random.default_rng(0))(Tensor(np.zeros((1, 4))))


def test_layer_norm_output_is_standardised():
    out = LayerNorm(6)(Tensor(np.random.default_rng(0).normal(size=(4, 6)))).data
    assert out.mean(axis=-1) == pytest.approx(np.zeros(4), abs=1e-12)
    assert out.std(axis=-1) == pytest.approx(np.ones(4), abs=1e-3)


def test_sinusoidal_encoding_at_zero():
    pe = sinusoidal_pe(np.array(0.0), 6).data
    assert pe == pytest.approx([0.0, 1.0, 0.0, 1.0, 0.0, 1.0])
    with pytest.raises(OddDimension):
        sinusoidal_pe(np.array(0.0), 5)


def test_position_embedding_halves():
    emb = position_embedding_2d(np.array([0.25, 0.5]), 8).data
    assert emb[:4] == pytest.approx(sinusoidal_pe(np.array(0.25), 4).data)
    assert emb[4:] == pytest.approx(sinusoidal_pe(np.array(0.5), 4).data)
    assert emb[0] == pytest.approx(math.sin(2 * math.pi * 0.25))
    assert grid_position_embedding(3, 4, 8).shape == (3, 4, 8)


def test_self_attention_groups_are_independent():
    attn = MultiHeadSelfAttention(CFG, np.random.default_rng(0))
    x = np.random.default_rng(1).normal(size=(2, 3, 8))
    base = attn(Tensor(x)).data
    changed = x.copy()
    changed[1] += 1.0
    out = attn(Tensor(changed)).data
    assert np.allclose(out[0], base[0], rtol=0.0, atol=1e-12)
    assert not np.allclose(out[1], base[1])
    assert attn.last_weights.sum(axis=-1) == pytest.approx(np.ones((2, 2, 3)))


def test_deformable_attention_shapes_and_ref_range():
    attn = DeformableCrossAttention(CFG, np.random.default_rng(0))
    value = Tensor(np.random.default_rng(1).normal(size=(4, 5, 8)))
    out = attn(Tensor(np.zeros((3, 8))), np.full((3, 2), 0.5), value)
    assert out.shape == (3, 8)
    assert attn.last_locations.shape == (3, 2, 2, 2)
    assert attn(Tensor(np.zeros(8)), np.array([0.5, 0.5]), value).shape == (8,)
    with pytest.raises(RefPointOutOfRange):
        attn(Tensor(np.zeros((1, 8))), np.array([[1.5, 0.5]]), value)


@pytest.mark.parametrize(
    "check",
    [grad.tensor_ops_property, grad.self_attention_property, grad.deformable_attention_property],
    ids=["ops", "self_attention", "deformable_attention"],
)
def test_backward_matches_finite_differences(check):
    outcome = check(2, suite_rng(7, 99))
    assert outcome.passed, (outcome.name, outcome.worst_error, outcome.detail)
