"""Generate a directory of seeded synthetic scenes."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

from configs.env_config import Env
from data.scene_dir import write_scene_dir
from data.synthetic import SPLITS, generate_synthetic
from model.records import SceneParams
from utils.errors import InvalidConfig, UsageError
from utils.logger.logger import Logger

DEFAULT_SEED = 0


async def run(
    *,
    out: Optional[str],
    seed: Optional[int] = None,
    n_images: int = 8,
    max_objects: int = 4,
    height: int = 64,
    width: int = 64,
    split: str = "train",
    classes: Optional[Sequence[str]] = None,
    logger: Logger,
) -> Path:
    """Write ``n_images`` scenes, their DOTA labels and a manifest under ``out``.

    :param out: Output directory (required).
    :param seed: Root seed; ``PAXKIT_SEED`` or 0 when omitted.
    :param split: Seed namespace, ``train`` or ``val``.
    :param classes: Category names; the generator defaults when omitted.
    :param logger: Logger injected by the command runner.
    :return: The scene directory.
    :raises UsageError: If ``out`` is missing or a parameter is out of range.
    :raises PlacementFailure: If objects cannot be placed without overlap.
    """

    if not out:
        raise UsageError("synth requires --out")
    if split not in SPLITS:
        raise UsageError(f"unknown split '{split}', expected one of {', '.join(SPLITS)}")
    if seed is None:
        seed = Env.seed()
    if seed is None:
        seed = DEFAULT_SEED

    extra = {"classes": tuple(classes)} if classes else {}
    try:
        params = SceneParams(n_images=n_images, height=height, width=width, max_objects=max_objects, **extra)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from exc

    logger.info(f"generating {params.n_images} {split} scenes ({params.height}x{params.width}) with seed {seed}")
    scenes = generate_synthetic(seed, params, split)
    root = write_scene_dir(out, scenes, seed, split, params)
    n_objects = sum(len(s.annotations) for s in scenes)
    logger.info(f"wrote {len(scenes)} scenes, {n_objects} objects to {root}")
    print(f"{root}: {len(scenes)} scenes, {n_objects} objects")
    return root
