"""Helpers for flattening dataclass records into plain dictionaries."""

from dataclasses import fields, is_dataclass
from typing import Any, Dict

import numpy as np


def _plain(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        return model_parser(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def model_parser(dataclass_obj: Any) -> Dict[str, Any]:
    """Convert a dataclass instance into JSON-ready builtins.

    Nested dataclasses become dicts, tuples and arrays become lists and
    numpy scalars become Python numbers.

    :param dataclass_obj: Dataclass instance to serialise.
    :return: Dictionary mapping field names to their values.
    :raises TypeError: If ``dataclass_obj`` is not a dataclass instance.
    """

    if not is_dataclass(dataclass_obj) or isinstance(dataclass_obj, type):
        raise TypeError("Input must be a dataclass instance")

    return {field.name: _plain(getattr(dataclass_obj, field.name)) for field in fields(dataclass_obj)}
