import numpy as np
import pytest

from data import SPLITS, generate_scene, generate_synthetic, load_scene_dir, parse_dota, read_dota, serialize_dota, write_dota, write_scene_dir
from data.scene_dir import MANIFEST
from data.synthetic import place_boxes
from geometry.boxes import quad_to_obb, rotated_iou
from model.records import SceneParams
from utils.errors import CheckpointMismatch, InvalidConfig, NonNumericCoordinate, ParseError, PlacementFailure, TooFewTokens

SMALL = SceneParams(n_images=3, height=32, width=32, max_objects=3, size_range=(6.0, 12.0))


def test_golden_file_is_a_fixpoint(golden_dota_path):
    text = golden_dota_path.read_text(encoding="utf-8")
    doc = parse_dota(text)
    assert serialize_dota(doc) == text
    assert doc.metadata == {"imagesource": "synthetic", "gsd": "0.5"}
    assert [a.category for a in doc.annotations] == ["plane", "ship", "vehicle"]
    assert [a.difficult for a in doc.annotations] == [0, 1, 0]


def test_difficulty_token_is_optional():
    doc = parse_dota("0 0 4 0 4 2 0 2 plane\n")
    assert doc.annotations[0].difficult == 0
    assert serialize_dota(doc) == "0 0 4 0 4 2 0 2 plane 0\n"


def test_write_and_read_dota(tmp_path, golden_dota_path):
    doc = read_dota(golden_dota_path)
    path = write_dota(tmp_path / "labels" / "a.txt", doc)
    assert path.read_text(encoding="utf-8") == golden_dota_path.read_text(encoding="utf-8")


@pytest.mark.parametrize(
    "text, error, line, column",
    [
        ("0 0 4 0 4 2 0 plane\n", TooFewTokens, 1, 9),
        ("gsd:1\n0 0 4 0 x 2 0 2 plane\n", NonNumericCoordinate, 2, 5),
        ("0 0 4 0 4 2 0 nan plane\n", NonNumericCoordinate, 1, 8),
        ("0 0 4 0 4 2 0 2 3\n", ParseError, 1, 9),
        ("0 0 4 0 4 2 0 2 plane 2\n", ParseError, 1, 10),
        ("0 0 4 0 4 2 0 2 plane 0 extra\n", ParseError, 1, 11),
    ],
)
def test_dota_parse_errors_carry_position(text, error, line, column):
    with pytest.raises(error) as info:
        parse_dota(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_synthetic_scenes_are_reproducible():
    a = generate_synthetic(7, SMALL)
    b = generate_synthetic(7, SMALL)
    for x, y in zip(a, b):
        assert x.scene_id == y.scene_id
        assert np.array_equal(x.image, y.image)
        assert [q.quad.flat() for q in x.annotations] == [q.quad.flat() for q in y.annotations]


def test_scene_does_not_depend_on_scene_count():
    third = generate_synthetic(7, SMALL)[2]
    alone = generate_scene(7, SMALL, 2)
    assert np.array_equal(third.image, alone.image)


def test_splits_draw_different_scenes():
    train = generate_scene(7, SMALL, 0, "train")
    val = generate_scene(7, SMALL, 0, "val")
    assert train.scene_id == "train_0000" and val.scene_id == "val_0000"
    assert not np.array_equal(train.image, val.image)
    with pytest.raises(InvalidConfig):
        generate_scene(7, SMALL, 0, "test")
    assert set(SPLITS) == {"train", "val"}


def test_synthetic_objects_fit_and_barely_overlap():
    for scene in generate_synthetic(3, SMALL):
        assert scene.image.shape == (32, 32, 3)
        assert 0.0 <= scene.image.min() and scene.image.max() <= 1.0
        assert 1 <= len(scene.annotations) <= SMALL.max_objects
        boxes = [quad_to_obb(a.quad) for a in scene.annotations]
        for ann in scene.annotations:
            assert np.all(ann.quad.corners >= 0.0) and np.all(ann.quad.corners <= 32.0)
            assert ann.category in SMALL.classes
        for i, a in enumerate(boxes):
            for b in boxes[i + 1 :]:
                assert rotated_iou(a, b) < SMALL.max_iou + 1e-6


def test_placement_failure_when_too_dense():
    params = SceneParams(height=16, width=16, size_range=(15.0, 15.0), aspect_range=(1.0, 1.0), max_attempts=20)
    with pytest.raises(PlacementFailure):
        place_boxes(np.random.default_rng(0), params, 3)


def test_scene_params_validation():
    with pytest.raises(InvalidConfig):
        SceneParams(size_range=(10.0, 5.0))
    with pytest.raises(InvalidConfig):
        SceneParams(classes=())


def test_scene_dir_roundtrip(tmp_path):
    scenes = generate_synthetic(5, SMALL, "val")
    root = write_scene_dir(tmp_path / "scenes", scenes, 5, "val", SMALL)
    loaded = load_scene_dir(root)
    assert loaded.manifest.seed == 5
    assert loaded.manifest.split == "val"
    assert loaded.manifest.params == SMALL
    assert loaded.classes == SMALL.classes
    assert [s.scene_id for s in loaded.scenes] == [s.scene_id for s in scenes]
    for old, new in zip(scenes, loaded.scenes):
        assert np.array_equal(old.image, new.image)
        assert [a.quad.flat() for a in new.annotations] == [a.quad.flat() for a in old.annotations]


def test_scene_dir_rejects_missing_or_bad_manifest(tmp_path):
    with pytest.raises(CheckpointMismatch):
        load_scene_dir(tmp_path)
    (tmp_path / MANIFEST).write_text("{not json", encoding="utf-8")
    with pytest.raises(CheckpointMismatch):
        load_scene_dir(tmp_path)


@pytest.mark.parametrize("damage", ["missing_image", "missing_labels", "not_an_array", "wrong_shape"])
def test_scene_dir_rejects_unreadable_scene_files(tmp_path, damage):
    scenes = generate_synthetic(5, SMALL, "train")
    root = write_scene_dir(tmp_path / "scenes", scenes, 5, "train", SMALL)
    scene_id = scenes[1].scene_id
    image = root / "images" / f"{scene_id}.npy"
    if damage == "missing_image":
        image.unlink()
    elif damage == "missing_labels":
        (root / "labelTxt" / f"{scene_id}.txt").unlink()
    elif damage == "not_an_array":
        image.write_bytes(b"plain text")
    else:
        np.save(image, np.zeros((4, 4)))
    with pytest.raises(CheckpointMismatch, match=scene_id):
        load_scene_dir(root)
