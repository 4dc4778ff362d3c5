"""Dense f64 tensor with reverse-mode gradients.

Every op builds its output with :func:`_result`, recording the parent tensors
and a closure mapping the output gradient to one gradient per parent.
:meth:`Tensor.backward` walks the graph in reverse topological order and
accumulates gradients into leaf tensors that require them.
"""

from __future__ import annotations

import contextlib
import threading
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from utils.errors import ShapeMismatch

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence]
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "enabled", True)


@contextlib.contextmanager
def no_grad():
    """Disable graph recording on the current thread."""

    previous = is_grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous


class Tensor:
    """n-dimensional float64 array that optionally tracks gradients."""

    __array_priority__ = 100

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.asarray(data.data if isinstance(data, Tensor) else data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[BackwardFn] = None

    # ---------- introspection ----------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # ---------- autograd ----------
    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Propagate ``grad`` (ones for a scalar) to every leaf that requires it.

        :param grad: Upstream gradient with this tensor's shape.
        :raises ShapeMismatch: If ``grad`` is omitted for a non-scalar or has the wrong shape.
        """

        if grad is None:
            if self.data.size != 1:
                raise ShapeMismatch(f"backward() on non-scalar tensor of shape {self.shape} needs a gradient")
            grad = np.ones_like(self.data)
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != self.shape:
            raise ShapeMismatch(f"gradient shape {grad.shape} != tensor shape {self.shape}")

        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))

        pending: dict[int, np.ndarray] = {id(self): grad}
        for node in reversed(order):
            g = pending.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = pending[key] + pg if key in pending else pg

    # ---------- operator sugar ----------
    def __add__(self, other): return add(self, other)
    def __radd__(self, other): return add(other, self)
    def __sub__(self, other): return sub(self, other)
    def __rsub__(self, other): return sub(other, self)
    def __mul__(self, other): return mul(self, other)
    def __rmul__(self, other): return mul(other, self)
    def __truediv__(self, other): return div(self, other)
    def __rtruediv__(self, other): return div(other, self)
    def __neg__(self): return neg(self)
    def __matmul__(self, other): return matmul(self, other)
    def __getitem__(self, index): return getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return tsum(self, axis, keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis, keepdims)

    def reshape(self, *shape) -> "Tensor":
        return reshape(self, shape[0] if len(shape) == 1 and isinstance(shape[0], (tuple, list)) else shape)

    def transpose(self, *axes) -> "Tensor":
        return transpose(self, axes[0] if len(axes) == 1 and isinstance(axes[0], (tuple, list)) else (axes or None))


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _result(data: np.ndarray, parents: Iterable[Tensor], backward: BackwardFn) -> Tensor:
    parents = tuple(parents)
    out = Tensor(data)
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeMismatch(f"{op}: cannot broadcast shapes {a.shape} and {b.shape}") from exc


# ---------- elementwise binary ----------
def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "add")
    return _result(a.data + b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "sub")
    return _result(a.data - b.data, (a, b), lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "mul")
    return _result(
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "div")
    return _result(
        a.data / b.data,
        (a, b),
        lambda g: (_unbroadcast(g / b.data, a.shape), _unbroadcast(-g * a.data / b.data ** 2, b.shape)),
    )


def neg(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return _result(-a.data, (a,), lambda g: (-g,))


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """Batched matrix product over the last two axes (both operands at least 2-D)."""

    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatch(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    try:
        data = a.data @ b.data
    except ValueError as exc:
        raise ShapeMismatch(f"matmul: incompatible batch shapes {a.shape} and {b.shape}") from exc
    return _result(
        data,
        (a, b),
        lambda g: (
            _unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.shape),
            _unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape),
        ),
    )


# ---------- reductions and shape ----------
def tsum(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _result(np.asarray(data), (a,), backward)


def mean(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.data.size if axis is None else int(np.prod([a.shape[i] for i in np.atleast_1d(axis)]))
    return tsum(a, axis, keepdims) * (1.0 / count)


def reshape(a: ArrayLike, shape) -> Tensor:
    a = as_tensor(a)
    try:
        data = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeMismatch(f"reshape: cannot view {a.shape} as {tuple(shape)}") from exc
    return _result(data, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: ArrayLike, axes=None) -> Tensor:
    a = as_tensor(a)
    axes = tuple(range(a.ndim))[::-1] if axes is None else tuple(axes)
    inverse = np.argsort(axes)
    return _result(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),))


def _is_basic_index(index) -> bool:
    parts = index if isinstance(index, tuple) else (index,)
    return all(isinstance(p, (int, np.integer, slice)) or p is Ellipsis or p is None for p in parts)


def getitem(a: ArrayLike, index) -> Tensor:
    a = as_tensor(a)
    basic = _is_basic_index(index)

    def backward(g):
        full = np.zeros_like(a.data)
        if basic:
            full[index] += g
        else:
            np.add.at(full, index, g)
        return (full,)

    return _result(a.data[index], (a,), backward)


def take(a: ArrayLike, indices, axis: int = 0) -> Tensor:
    """Gather entries along ``axis``; repeated indices accumulate gradient."""

    a = as_tensor(a)
    idx = np.asarray(indices, dtype=np.int64)

    def backward(g):
        full = np.zeros_like(a.data)
        moved = np.moveaxis(full, axis, 0)
        np.add.at(moved, idx, np.moveaxis(g, axis, 0))
        return (full,)

    return _result(np.take(a.data, idx, axis=axis), (a,), backward)


def concat(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeMismatch(f"concat: incompatible shapes {[t.shape for t in tensors]}") from exc
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]
    return _result(data, tensors, lambda g: tuple(np.split(g, splits, axis=axis)))


def stack(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        data = np.stack([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeMismatch(f"stack: incompatible shapes {[t.shape for t in tensors]}") from exc
    return _result(data, tensors, lambda g: tuple(np.take(g, i, axis=axis) for i in range(len(tensors))))


# ---------- elementwise unary ----------
def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    y = np.exp(a.data)
    return _result(y, (a,), lambda g: (g * y,))


def log(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return _result(np.log(a.data), (a,), lambda g: (g / a.data,))


def sin(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return _result(np.sin(a.data), (a,), lambda g: (g * np.cos(a.data),))


def cos(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return _result(np.cos(a.data), (a,), lambda g: (-g * np.sin(a.data),))


def relu(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0
    return _result(a.data * mask, (a,), lambda g: (g * mask,))


def sigmoid(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    y = expit(a.data)
    return _result(y, (a,), lambda g: (g * y * (1.0 - y),))


def inverse_sigmoid(a: ArrayLike, eps: float = 1e-5) -> Tensor:
    """``log(x / (1 - x))`` of ``x`` clipped to ``[eps, 1 - eps]``."""

    x = clip(a, eps, 1.0 - eps)
    return log(x) - log(1.0 - x)


def clip(a: ArrayLike, low: float, high: float) -> Tensor:
    a = as_tensor(a)
    mask = (a.data >= low) & (a.data <= high)
    return _result(np.clip(a.data, low, high), (a,), lambda g: (g * mask,))


def softmax(a: ArrayLike, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = np.exp(a.data - a.data.max(axis=axis, keepdims=True))
    y = shifted / shifted.sum(axis=axis, keepdims=True)
    return _result(y, (a,), lambda g: (y * (g - (g * y).sum(axis=axis, keepdims=True)),))


def layer_norm(a: ArrayLike, eps: float = 1e-5) -> Tensor:
    """Normalise over the last axis to zero mean and unit variance (no affine)."""

    a = as_tensor(a)
    mu = a.data.mean(axis=-1, keepdims=True)
    centered = a.data - mu
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv_std

    def backward(g):
        return (inv_std * (g - g.mean(axis=-1, keepdims=True) - xhat * (g * xhat).mean(axis=-1, keepdims=True)),)

    return _result(xhat, (a,), backward)


# ---------- sampling ----------
def bilinear_sample(value: ArrayLike, loc: ArrayLike) -> Tensor:
    """Sample an ``(H, W, C)`` map at normalised ``(x, y)`` locations.

    Cell ``(i, j)`` covers ``[j/W, (j+1)/W) x [i/H, (i+1)/H)`` and its value sits
    at the cell centre. Samples falling outside the map read zeros.

    :param value: ``(H, W, C)`` feature map.
    :param loc: ``(..., 2)`` locations in ``[0, 1]`` image-normalised coordinates.
    :return: ``(..., C)`` samples.
    :raises ShapeMismatch: If shapes are not ``(H, W, C)`` and ``(..., 2)``.
    """

    value, loc = as_tensor(value), as_tensor(loc)
    if value.ndim != 3 or loc.shape[-1:] != (2,):
        raise ShapeMismatch(f"bilinear_sample: expected (H, W, C) and (..., 2), got {value.shape} and {loc.shape}")
    height, width, _ = value.shape
    px = loc.data[..., 0] * width - 0.5
    py = loc.data[..., 1] * height - 0.5
    x0 = np.floor(px).astype(np.int64)
    y0 = np.floor(py).astype(np.int64)
    fx = px - x0
    fy = py - y0

    corners = []
    for dy, dx, weight, dwdx, dwdy in (
        (0, 0, (1 - fx) * (1 - fy), -(1 - fy), -(1 - fx)),
        (0, 1, fx * (1 - fy), (1 - fy), -fx),
        (1, 0, (1 - fx) * fy, -fy, (1 - fx)),
        (1, 1, fx * fy, fy, fx),
    ):
        xi, yi = x0 + dx, y0 + dy
        valid = (xi >= 0) & (xi < width) & (yi >= 0) & (yi < height)
        gathered = value.data[np.clip(yi, 0, height - 1), np.clip(xi, 0, width - 1)] * valid[..., None]
        corners.append((xi, yi, valid, weight, dwdx, dwdy, gathered))

    out = sum(c[3][..., None] * c[6] for c in corners)

    def backward(g):
        grad_value = np.zeros_like(value.data)
        grad_loc = np.zeros_like(loc.data)
        for xi, yi, valid, weight, dwdx, dwdy, gathered in corners:
            contrib = g * weight[..., None]
            np.add.at(grad_value, (yi[valid], xi[valid]), contrib[valid])
            along = (g * gathered).sum(axis=-1)
            grad_loc[..., 0] += along * dwdx * width
            grad_loc[..., 1] += along * dwdy * height
        return grad_value, grad_loc

    return _result(out, (value, loc), backward)


def attach_loss(value: float, pairs: Sequence[tuple[Tensor, np.ndarray]]) -> Tensor:
    """Scalar node whose gradient w.r.t. each tensor is the given array.

    Lets a loss computed outside the graph (with its own analytic gradient)
    drive :meth:`Tensor.backward`.
    """

    tensors = [t for t, _ in pairs]
    grads = [np.asarray(gr, dtype=np.float64) for _, gr in pairs]
    for t, gr in zip(tensors, grads):
        if gr.shape != t.shape:
            raise ShapeMismatch(f"attach_loss: gradient shape {gr.shape} != tensor shape {t.shape}")
    return _result(np.asarray(float(value)), tensors, lambda g: tuple(float(g) * gr for gr in grads))
