"""Train the detector on a scene directory and write a checkpoint plus a metrics stream."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import yaml

from configs.run_config import flatten_run_config, load_run_config, with_overrides
from data.scene_dir import load_scene_dir
from detector.checkpoint import save_checkpoint
from training.trainer import Trainer
from utils.errors import InvalidConfig, UsageError
from utils.logger.logger import Logger
from utils.metrics import MetricsWriter

CHECKPOINT = "model.ckpt"
METRICS = "metrics.jsonl"
RESOLVED_CONFIG = "config.yaml"


async def run(
    *,
    data: Optional[str],
    out: Optional[str],
    config: Optional[str] = None,
    val_data: Optional[str] = None,
    epochs: Optional[int] = None,
    threads: Optional[int] = None,
    logger: Logger,
) -> Path:
    """Fit a model and write ``model.ckpt``, ``metrics.jsonl`` and the resolved ``config.yaml`` under ``out``.

    :param data: Training scene directory.
    :param out: Output directory.
    :param config: Flat YAML run config; the packaged default when omitted.
    :param val_data: Optional validation scene directory.
    :param epochs: Override of ``epochs``.
    :param threads: Override of ``threads`` (evaluation workers).
    :param logger: Logger injected by the command runner.
    :return: Path of the written checkpoint.
    :raises UnknownKey: If the config names an unknown key.
    :raises NonFiniteLoss: If a batch loss becomes NaN or infinite.
    """

    if not data or not out:
        raise UsageError("train requires --data and --out")
    run_cfg = load_run_config(config)
    overrides = {k: v for k, v in (("epochs", epochs), ("threads", threads)) if v is not None}
    if overrides:
        run_cfg = with_overrides(run_cfg, **overrides)

    train_set = load_scene_dir(data)
    classes = train_set.classes
    if len(classes) != run_cfg.model.n_classes:
        raise InvalidConfig(f"n_classes={run_cfg.model.n_classes} but {data} has {len(classes)} classes")
    val_scenes = None
    if val_data:
        val_set = load_scene_dir(val_data)
        if val_set.classes != classes:
            raise InvalidConfig(f"{val_data} classes {val_set.classes} differ from training classes {classes}")
        val_scenes = val_set.scenes

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / RESOLVED_CONFIG).open("w", encoding="utf-8") as f:
        yaml.safe_dump(flatten_run_config(run_cfg), f, sort_keys=False)

    logger.info(
        f"training on {len(train_set.scenes)} scenes for {run_cfg.train.epochs} epochs "
        f"(seed={run_cfg.train.seed}, K={run_cfg.model.K}, N={run_cfg.model.N}, n_bins={run_cfg.codec.n_bins})"
    )
    trainer = Trainer(
        run_cfg,
        train_set.scenes,
        classes,
        logger=logger,
        val_scenes=val_scenes,
        metrics=MetricsWriter(out_dir / METRICS),
    )
    result = await trainer.fit()
    path = save_checkpoint(out_dir / CHECKPOINT, result.model, run_cfg)
    final = result.final
    logger.info(f"checkpoint written to {path}")
    print(f"epoch {final.epoch}: loss={final.loss:.6f} mAP50={final.mAP50} mAP75={final.mAP75} -> {path}")
    return path
