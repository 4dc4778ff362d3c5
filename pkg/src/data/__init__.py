from data.dota import parse_dota, read_dota, serialize_dota, write_dota
from data.scene_dir import SceneSet, load_scene_dir, write_scene_dir
from data.synthetic import SPLITS, generate_scene, generate_synthetic

__all__ = [
    "SPLITS",
    "SceneSet",
    "generate_scene",
    "generate_synthetic",
    "load_scene_dir",
    "parse_dota",
    "read_dota",
    "serialize_dota",
    "write_dota",
    "write_scene_dir",
]
