import numpy as np
import pytest

import nn.tensor as ops
from nn.tensor import Tensor, attach_loss, bilinear_sample, no_grad
from utils.errors import ShapeMismatch


def test_square_sum_gradient():
    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    (x * x).sum().backward()
    assert x.grad == pytest.approx([2.0, 4.0, 6.0])


def test_broadcast_add_reduces_gradient():
    a = Tensor(np.ones((2, 3)), requires_grad=True)
    b = Tensor(np.zeros(3), requires_grad=True)
    (a + b).sum().backward()
    assert b.grad == pytest.approx([2.0, 2.0, 2.0])
    assert a.grad.shape == (2, 3)


def test_gradients_accumulate_across_uses():
    x = Tensor(3.0, requires_grad=True)
    y = x * x + x * 2.0
    y.backward()
    assert x.grad == pytest.approx(8.0)


def test_no_grad_records_nothing():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with no_grad():
        y = (x * 3.0).sum()
    assert not y.requires_grad
    assert ops.is_grad_enabled()


def test_backward_needs_gradient_for_non_scalar():
    x = Tensor([1.0, 2.0], requires_grad=True)
    with pytest.raises(ShapeMismatch):
        (x * 2.0).backward()


def test_broadcast_mismatch_raises():
    with pytest.raises(ShapeMismatch):
        ops.add(Tensor(np.ones(3)), Tensor(np.ones(4)))


def test_take_accumulates_repeated_indices():
    x = Tensor(np.arange(6.0).reshape(3, 2), requires_grad=True)
    ops.take(x, [0, 0, 2]).sum().backward()
    assert x.grad[:, 0] == pytest.approx([2.0, 0.0, 1.0])


def test_detach_cuts_the_graph():
    x = Tensor([1.0], requires_grad=True)
    y = x.detach() * 2.0
    assert not y.requires_grad


def test_bilinear_sample_reads_cell_centres_and_zero_outside():
    value = Tensor(np.arange(4.0).reshape(2, 2, 1))
    loc = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [-1.0, -1.0]])
    out = bilinear_sample(value, loc).data[:, 0]
    assert out == pytest.approx([0.0, 1.0, 2.0, 0.0])


def test_bilinear_sample_interpolates_between_centres():
    value = Tensor(np.array([[[0.0], [2.0]]]))
    out = bilinear_sample(value, np.array([[0.5, 0.5]])).data
    assert out[0, 0] == pytest.approx(1.0)


def test_attach_loss_injects_gradient():
    x = Tensor(np.zeros((2, 2)), requires_grad=True)
    grad = np.array([[1.0, -1.0], [0.5, 2.0]])
    loss = attach_loss(3.5, [(x, grad)])
    assert loss.item() == 3.5
    (loss * 2.0).backward()
    assert x.grad == pytest.approx(2.0 * grad)


def test_attach_loss_shape_check():
    with pytest.raises(ShapeMismatch):
        attach_loss(1.0, [(Tensor(np.zeros(2), requires_grad=True), np.zeros(3))])


def test_softmax_rows_sum_to_one():
    y = ops.softmax(Tensor(np.random.default_rng(0).normal(size=(3, 5))), axis=-1)
    assert y.data.sum(axis=-1) == pytest.approx(np.ones(3))
