"""Flat YAML run configuration.

Every key of ``default.yaml`` names exactly one field of one config section;
the loader routes it there, converts the value to the field's declared type
and builds a :class:`model.config.RunConfig`.
"""

from __future__ import annotations

from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Union, get_type_hints

import msgspec
import yaml

from configs.env_config import Env
from model.config import (
    AttentionConfig,
    AxisCodecConfig,
    LossConfig,
    ModelConfig,
    OptimizerConfig,
    RunConfig,
    TrainConfig,
)
from utils.errors import ConfigTypeError, UnknownKey

DEFAULT_CONFIG = Path(__file__).with_name("default.yaml")

SECTIONS = {
    "model": ModelConfig,
    "attention": AttentionConfig,
    "loss": LossConfig,
    "codec": AxisCodecConfig,
    "optimizer": OptimizerConfig,
    "train": TrainConfig,
}

# nested sections and the attention width, which always follows ``dim``
_DERIVED = {("model", "attention"), ("loss", "codec"), ("attention", "dim")}

FLAG_WORDS = {"true": True, "yes": True, "on": True, "1": True, "false": False, "no": False, "off": False, "0": False}


def _key_table() -> dict[str, tuple[str, type]]:
    table: dict[str, tuple[str, type]] = {}
    for section, cls in SECTIONS.items():
        hints = get_type_hints(cls)
        for f in fields(cls):
            if (section, f.name) in _DERIVED:
                continue
            table[f.name] = (section, hints[f.name])
    return table


KEYS = _key_table()


def parse_flag(value: Any) -> bool:
    """Booleans, or one of the words in ``FLAG_WORDS`` (case-insensitive); anything else is rejected."""

    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in FLAG_WORDS:
        return FLAG_WORDS[value.strip().lower()]
    raise ValueError(f"expected true or false, got {value!r}")


def _convert(key: str, value: Any, annotation: type) -> Any:
    try:
        if annotation is bool:
            return parse_flag(value)
        if annotation is float and isinstance(value, bool):
            raise ValueError("booleans are not numbers")
        return msgspec.convert(value, annotation, strict=False)
    except (ValueError, msgspec.ValidationError) as exc:
        raise ConfigTypeError(f"config key '{key}': {exc}") from None


def build_run_config(values: Mapping[str, Any], seed_override: Optional[int] = None) -> RunConfig:
    """Build a run config from a flat mapping; missing keys keep their defaults.

    :param values: Flat ``key -> value`` mapping.
    :param seed_override: Replaces ``seed`` when given.
    :raises UnknownKey: For a key no section declares.
    :raises ConfigTypeError: For a value of the wrong type.
    :raises InvalidConfig: When the assembled sections violate an invariant.
    """

    sections: dict[str, dict[str, Any]] = {name: {} for name in SECTIONS}
    for key, value in values.items():
        if key not in KEYS:
            raise UnknownKey(str(key))
        section, annotation = KEYS[key]
        sections[section][key] = _convert(key, value, annotation)
    if seed_override is not None:
        sections["train"]["seed"] = seed_override

    dim = sections["model"].get("dim", ModelConfig.dim)
    attention = AttentionConfig(dim=dim, **sections["attention"])
    codec = AxisCodecConfig(**sections["codec"])
    return RunConfig(
        model=ModelConfig(attention=attention, **sections["model"]),
        loss=LossConfig(codec=codec, **sections["loss"]),
        optimizer=OptimizerConfig(**sections["optimizer"]),
        train=TrainConfig(**sections["train"]),
    )


def _yaml_reason(exc: yaml.YAMLError) -> str:
    """One-line description of a YAML error, with its 1-based position when known."""

    problem = getattr(exc, "problem", None) or str(exc).splitlines()[0]
    mark = getattr(exc, "problem_mark", None)
    if mark is None:
        return problem
    return f"line {mark.line + 1}, column {mark.column + 1}: {problem}"


def load_run_config(path: Union[str, Path, None] = None, use_env: bool = True) -> RunConfig:
    """Load a flat YAML run config.

    :param path: Config file; the packaged ``default.yaml`` when omitted.
    :param use_env: Apply the ``PAXKIT_SEED`` override.
    :return: Validated run config.
    :raises ConfigTypeError: If the file cannot be read, is not valid YAML or is not a mapping.
    """

    path = Path(path) if path is not None else DEFAULT_CONFIG
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as exc:
        raise ConfigTypeError(f"{path}: cannot read config ({exc.strerror or exc})") from exc
    except yaml.YAMLError as exc:
        raise ConfigTypeError(f"{path}: invalid YAML ({_yaml_reason(exc)})") from exc
    if not isinstance(data, dict):
        raise ConfigTypeError(f"{path}: expected a mapping of config keys, got {type(data).__name__}")
    return build_run_config(data, seed_override=Env.seed() if use_env else None)


def flatten_run_config(cfg: RunConfig) -> dict[str, Any]:
    """Inverse of :func:`build_run_config`: the flat mapping that rebuilds ``cfg``."""

    sources = {
        "model": cfg.model,
        "attention": cfg.model.attention,
        "loss": cfg.loss,
        "codec": cfg.codec,
        "optimizer": cfg.optimizer,
        "train": cfg.train,
    }
    flat = {}
    for key, (section, _) in KEYS.items():
        value = getattr(sources[section], key)
        flat[key] = list(value) if isinstance(value, tuple) else value
    return flat


def with_overrides(cfg: RunConfig, **train_fields: Any) -> RunConfig:
    """Copy of ``cfg`` with selected :class:`TrainConfig` fields replaced."""

    return replace(cfg, train=replace(cfg.train, **train_fields))
