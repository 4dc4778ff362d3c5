"""Central finite-difference gradient checking."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from nn.module import Module
from nn.tensor import Tensor


def numeric_gradient(
    fn: Callable[[np.ndarray], float],
    x: np.ndarray,
    eps: float = 1e-5,
    indices: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Central differences of a scalar function of an array.

    :param fn: Function of ``x`` returning a float; ``x`` is mutated in place during the call.
    :param x: Evaluation point (restored on return).
    :param eps: Step size.
    :param indices: Flat indices to differentiate; all entries when omitted (others stay 0).
    :return: Array shaped like ``x``.
    """

    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size) if indices is None else indices:
        original = flat[i]
        flat[i] = original + eps
        plus = fn(x)
        flat[i] = original - eps
        minus = fn(x)
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    """``max|a - n| / max(max|a|, max|n|, floor)``."""

    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.max(np.abs(analytic), initial=0.0)), float(np.max(np.abs(numeric), initial=0.0)), floor)
    return float(np.max(np.abs(analytic - numeric), initial=0.0)) / scale


def check_tensor_gradients(
    loss_fn: Callable[[], Tensor],
    tensors: Sequence[Tensor],
    eps: float = 1e-5,
    max_entries: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    kink_guard: bool = False,
) -> float:
    """Compare :meth:`Tensor.backward` gradients with central differences.

    :param loss_fn: Builds a fresh scalar loss from the current tensor data.
    :param tensors: Leaf tensors with ``requires_grad``; their data is perturbed in place.
    :param eps: Step size.
    :param max_entries: Check at most this many randomly chosen entries per tensor.
    :param rng: Generator used to pick the entries.
    :param kink_guard: Also difference with step ``eps / 4`` and drop entries where
        the two estimates disagree (a ReLU or sampling kink lies within the step).
    :return: Relative error of all checked entries together, scaled by the
        largest gradient entry among them.
    """

    rng = rng or np.random.default_rng(0)
    for t in tensors:
        t.data = np.ascontiguousarray(t.data)
        t.grad = None
    loss_fn().backward()
    analytic = [t.grad.copy() if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    checked_analytic, checked_numeric = [], []
    for t, grad in zip(tensors, analytic):
        indices = np.arange(t.data.size)
        if max_entries is not None and t.data.size > max_entries:
            indices = np.sort(rng.choice(t.data.size, size=max_entries, replace=False))
        numeric = numeric_gradient(lambda _: loss_fn().item(), t.data, eps, indices).reshape(-1)[indices]
        if kink_guard:
            fine = numeric_gradient(lambda _: loss_fn().item(), t.data, eps / 4.0, indices).reshape(-1)[indices]
            smooth = np.abs(numeric - fine) <= 1e-7 + 1e-5 * np.abs(fine)
            indices, numeric = indices[smooth], fine[smooth]
        checked_analytic.append(grad.reshape(-1)[indices])
        checked_numeric.append(numeric)
    if not checked_analytic:
        return 0.0
    return relative_error(np.concatenate(checked_analytic), np.concatenate(checked_numeric))


def check_module(
    module: Module,
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    max_entries: Optional[int] = 8,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Gradient-check a module's parameters and inputs under a random linear read-out.

    The scalar checked is ``sum(module(*inputs) * W)`` for a fixed random ``W``,
    so every output entry contributes.

    :param module: Module under test.
    :param inputs: Input tensors; those with ``requires_grad`` are checked too.
    :return: Worst relative error.
    """

    rng = rng or np.random.default_rng(0)
    with_grad = [t for t in inputs if t.requires_grad]
    readout = Tensor(rng.normal(size=module(*inputs).shape))

    def loss() -> Tensor:
        return (module(*inputs) * readout).sum()

    return check_tensor_gradients(loss, [p for _, p in module.named_parameters()] + with_grad, eps, max_entries, rng)
