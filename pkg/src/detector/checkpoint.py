"""Versioned checkpoint container: a header line followed by a msgpack payload.

The payload holds the full run config and every named parameter as
``(shape, little-endian float64 bytes)``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import msgspec
import numpy as np

from detector.oriented_detr import OrientedDETR
from model.config import RunConfig
from utils.errors import CheckpointMismatch

HEADER = b"PAXKIT-CKPT-v1\n"


class _Tensor(msgspec.Struct):
    name: str
    shape: list[int]
    data: bytes


class _Payload(msgspec.Struct):
    config: RunConfig
    parameters: list[_Tensor]


def save_checkpoint(path: Union[str, Path], model: OrientedDETR, run_cfg: RunConfig) -> Path:
    """Write the model parameters and run config to ``path``."""

    tensors = [
        _Tensor(name=name, shape=list(p.shape), data=np.ascontiguousarray(p.data, dtype="<f8").tobytes())
        for name, p in model.named_parameters()
    ]
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(HEADER + msgspec.msgpack.encode(_Payload(config=run_cfg, parameters=tensors)))
    return target


def read_checkpoint(path: Union[str, Path]) -> tuple[RunConfig, dict[str, np.ndarray]]:
    """Decode a checkpoint into its run config and parameter arrays.

    :raises CheckpointMismatch: If the file cannot be read or its header or payload is invalid.
    """

    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointMismatch(f"{path}: cannot read checkpoint ({exc.strerror or exc})") from exc
    if not raw.startswith(HEADER):
        raise CheckpointMismatch(f"{path}: missing header {HEADER.strip().decode()}")
    try:
        payload = msgspec.msgpack.decode(raw[len(HEADER):], type=_Payload)
    except (msgspec.DecodeError, msgspec.ValidationError, ValueError) as exc:
        raise CheckpointMismatch(f"{path}: corrupt payload ({exc})") from exc
    state = {}
    for t in payload.parameters:
        array = np.frombuffer(t.data, dtype="<f8")
        if array.size != int(np.prod(t.shape)):
            raise CheckpointMismatch(f"{path}: parameter {t.name} has {array.size} values for shape {t.shape}")
        state[t.name] = array.reshape(t.shape).astype(np.float64)
    return payload.config, state


def load_model(path: Union[str, Path]) -> tuple[OrientedDETR, RunConfig]:
    """Rebuild the model described by a checkpoint and load its parameters."""

    run_cfg, state = read_checkpoint(path)
    model = OrientedDETR(run_cfg.model, run_cfg.codec, seed=run_cfg.train.seed)
    model.load_state_dict(state)
    return model, run_cfg
