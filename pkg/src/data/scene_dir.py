"""Scene directories on disk.

Layout::

    <root>/manifest.json        seed, split, generator params, scene ids
    <root>/images/<id>.npy      float64 (H, W, 3) image
    <root>/labelTxt/<id>.txt    DOTA annotations
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import msgspec
import numpy as np

from data.dota import read_dota, write_dota
from model.records import DotaFile, SceneParams, SyntheticScene
from utils.errors import CheckpointMismatch, PaxkitError

MANIFEST = "manifest.json"
IMAGES = "images"
LABELS = "labelTxt"
FORMAT = "paxkit-scenes-v1"


class Manifest(msgspec.Struct):
    format: str
    seed: int
    split: str
    params: SceneParams
    scenes: list[str]


@dataclass
class SceneSet:
    manifest: Manifest
    scenes: list[SyntheticScene]

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(self.manifest.params.classes)


def write_scene_dir(
    root: Union[str, Path], scenes: Sequence[SyntheticScene], seed: int, split: str, params: SceneParams
) -> Path:
    """Write scenes and their manifest under ``root`` (created when missing)."""

    root = Path(root)
    (root / IMAGES).mkdir(parents=True, exist_ok=True)
    (root / LABELS).mkdir(parents=True, exist_ok=True)
    for scene in scenes:
        np.save(root / IMAGES / f"{scene.scene_id}.npy", scene.image, allow_pickle=False)
        write_dota(root / LABELS / f"{scene.scene_id}.txt", DotaFile(annotations=scene.annotations))
    manifest = Manifest(format=FORMAT, seed=seed, split=split, params=params, scenes=[s.scene_id for s in scenes])
    (root / MANIFEST).write_bytes(msgspec.json.format(msgspec.json.encode(manifest), indent=2) + b"\n")
    return root


def load_scene_dir(root: Union[str, Path]) -> SceneSet:
    """Read a directory written by :func:`write_scene_dir`.

    :raises CheckpointMismatch: If the manifest is missing or malformed, or a listed image or label file cannot be read.
    :raises ParseError: If an annotation file is malformed.
    """

    root = Path(root)
    path = root / MANIFEST
    if not path.is_file():
        raise CheckpointMismatch(f"{root}: no {MANIFEST}, not a scene directory")
    try:
        manifest = msgspec.json.decode(path.read_bytes(), type=Manifest)
    except (msgspec.DecodeError, msgspec.ValidationError) as exc:
        raise CheckpointMismatch(f"{path}: {exc}") from exc
    except PaxkitError as exc:
        raise CheckpointMismatch(f"{path}: {exc}") from exc
    if manifest.format != FORMAT:
        raise CheckpointMismatch(f"{path}: unsupported format '{manifest.format}'")

    scenes = []
    for scene_id in manifest.scenes:
        image_path = root / IMAGES / f"{scene_id}.npy"
        try:
            image = np.load(image_path, allow_pickle=False)
            doc = read_dota(root / LABELS / f"{scene_id}.txt")
        except OSError as exc:
            raise CheckpointMismatch(f"{root}: scene '{scene_id}' is unreadable ({exc.strerror or exc})") from exc
        except ValueError as exc:
            if isinstance(exc, PaxkitError):
                raise
            raise CheckpointMismatch(f"{root}: scene '{scene_id}' is unreadable ({exc})") from exc
        if image.ndim != 3 or image.shape[-1] != 3:
            raise CheckpointMismatch(f"{image_path}: expected an (H, W, 3) image, got shape {image.shape}")
        scenes.append(SyntheticScene(image=image, annotations=doc.annotations, seed=manifest.seed, scene_id=scene_id))
    return SceneSet(manifest=manifest, scenes=scenes)
