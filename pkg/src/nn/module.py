"""Parameter containers with deterministic, dotted parameter naming."""

from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from nn.tensor import Tensor
from utils.errors import CheckpointMismatch


class Parameter(Tensor):
    """Leaf tensor that always requires a gradient."""

    def __init__(self, data, name=None):
        super().__init__(np.array(data, dtype=np.float64), requires_grad=True, name=name)


class Module:
    """Base class; attributes holding parameters, modules or lists of modules are registered."""

    training: bool = True

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def named_parameters(self, prefix: str = "", _seen: Optional[set[int]] = None) -> Iterator[tuple[str, Parameter]]:
        """Yield ``(dotted_name, parameter)`` in attribute definition order.

        A parameter reachable under several names is reported once, under the first.
        """

        seen = set() if _seen is None else _seen
        for attr, value in vars(self).items():
            name = f"{prefix}{attr}"
            if isinstance(value, Parameter):
                if id(value) not in seen:
                    seen.add(id(value))
                    yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(name + ".", seen)
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.", seen)

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Copy arrays into parameters of the same names and shapes.

        :raises CheckpointMismatch: On missing, unexpected or mis-shaped entries.
        """

        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        unexpected = sorted(set(state) - set(own))
        if missing or unexpected:
            raise CheckpointMismatch(f"parameter names differ: missing={missing[:5]}, unexpected={unexpected[:5]}")
        for name, param in own.items():
            array = np.asarray(state[name], dtype=np.float64)
            if array.shape != param.shape:
                raise CheckpointMismatch(f"parameter {name}: checkpoint shape {array.shape} != model shape {param.shape}")
            param.data = array.copy()
