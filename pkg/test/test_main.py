import msgspec
import pytest
import yaml

from main import cli
from utils.metrics import read_metrics

TINY_CONFIG = {
    "K": 5,
    "N": 4,
    "dim": 8,
    "n_layers": 1,
    "n_classes": 3,
    "patch_size": 8,
    "ffn_dim": 16,
    "n_heads": 2,
    "n_sample_points": 2,
    "n_bins": 16,
    "sigma": 1.0,
    "epochs": 3,
    "eval_every": 1,
}


def _error_line(capsys) -> str:
    return capsys.readouterr().err.strip().splitlines()[-1]


def test_synth_train_eval_end_to_end(tmp_path, capsys):
    scenes, run_dir = tmp_path / "scenes", tmp_path / "run"
    config = tmp_path / "tiny.yaml"
    config.write_text(yaml.safe_dump(TINY_CONFIG), encoding="utf-8")

    assert cli(["synth", "--out", str(scenes), "--seed", "2", "--n-images", "2"]) == 0
    assert cli(["train", "--data", str(scenes), "--out", str(run_dir), "--config", str(config), "--epochs", "1"]) == 0
    assert (run_dir / "model.ckpt").is_file()
    assert [row["epoch"] for row in read_metrics(run_dir / "metrics.jsonl")] == [0, 1]
    resolved = yaml.safe_load((run_dir / "config.yaml").read_text(encoding="utf-8"))
    assert resolved["epochs"] == 1 and resolved["K"] == 5

    capsys.readouterr()
    assert cli(["eval", "--checkpoint", str(run_dir / "model.ckpt"), "--data", str(scenes), "--protocol", "voc07"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("protocol=voc07 iou=0.5")
    report = msgspec.json.decode((run_dir / "ap.json").read_bytes())
    assert report["protocol"] == "voc07"
    assert report["mAP50"] == report["mean_ap"]
    assert (run_dir / "detections.txt").is_file()
    assert (run_dir / "ap.txt").read_text(encoding="utf-8").strip() == out.strip()


def test_eval_rejects_class_mismatch(tmp_path, capsys):
    config = tmp_path / "tiny.yaml"
    config.write_text(yaml.safe_dump({**TINY_CONFIG, "epochs": 0}), encoding="utf-8")
    assert cli(["synth", "--out", str(tmp_path / "three"), "--n-images", "1"]) == 0
    assert cli(["synth", "--out", str(tmp_path / "two"), "--n-images", "1", "--classes", "car,truck"]) == 0
    assert cli(["train", "--data", str(tmp_path / "three"), "--out", str(tmp_path / "run"), "--config", str(config)]) == 0
    code = cli(["eval", "--checkpoint", str(tmp_path / "run" / "model.ckpt"), "--data", str(tmp_path / "two")])
    assert code == 1
    assert _error_line(capsys).startswith("paxkit: error: CheckpointMismatch:")


def test_train_rejects_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "bad.yaml"
    config.write_text("learning_rate: 0.1\n", encoding="utf-8")
    assert cli(["synth", "--out", str(tmp_path / "scenes"), "--n-images", "1"]) == 0
    code = cli(["train", "--data", str(tmp_path / "scenes"), "--out", str(tmp_path / "run"), "--config", str(config)])
    assert code == 1
    assert _error_line(capsys) == "paxkit: error: UnknownKey: unknown config key 'learning_rate'"


def test_axis_demo_through_cli(capsys):
    assert cli(["axis-demo", "--theta", "0", "--sigma", "0"]) == 0
    assert "encoding: 0:1.0000 90:1.0000 180:1.0000 270:1.0000" in capsys.readouterr().out


def test_verify_quick_through_cli(capsys):
    assert cli(["verify", "--suite", "match", "--quick"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["synth"],
        ["axis-demo"],
        ["axis-demo", "--theta", "north"],
        ["verify", "--suite", "speed"],
        ["eval", "--checkpoint", "x", "--data", "y", "--protocol", "voc10"],
    ],
)
def test_argparse_errors_exit_2(argv, capsys):
    assert cli(argv) == 2


def test_usage_errors_from_commands_exit_2(capsys):
    assert cli(["axis-demo", "--theta", "10", "--n-bins", "30"]) == 2
    assert _error_line(capsys).startswith("paxkit: error: UsageError:")
    assert cli(["axis-demo", "--theta", "nan"]) == 2


def test_missing_scene_directory_exits_1(tmp_path, capsys):
    code = cli(["train", "--data", str(tmp_path / "nowhere"), "--out", str(tmp_path / "run")])
    assert code == 1
    assert "CheckpointMismatch" in _error_line(capsys)


def test_help_exits_0(capsys):
    assert cli(["--help"]) == 0
    assert "axis-demo" in capsys.readouterr().out


def test_missing_checkpoint_exits_1(tmp_path, capsys):
    assert cli(["synth", "--out", str(tmp_path / "scenes"), "--n-images", "1"]) == 0
    code = cli(["eval", "--checkpoint", str(tmp_path / "none.ckpt"), "--data", str(tmp_path / "scenes")])
    assert code == 1
    line = _error_line(capsys)
    assert line.startswith("paxkit: error: CheckpointMismatch:")
    assert "none.ckpt" in line


@pytest.mark.parametrize(
    ("text", "fragment"),
    [(None, "cannot read config"), ("K: [5\n", "invalid YAML"), ("- 1\n- 2\n", "expected a mapping")],
)
def test_unusable_config_file_exits_1(tmp_path, capsys, text, fragment):
    config = tmp_path / "run.yaml"
    if text is not None:
        config.write_text(text, encoding="utf-8")
    assert cli(["synth", "--out", str(tmp_path / "scenes"), "--n-images", "1"]) == 0
    code = cli(["train", "--data", str(tmp_path / "scenes"), "--out", str(tmp_path / "run"), "--config", str(config)])
    assert code == 1
    line = _error_line(capsys)
    assert line.startswith("paxkit: error: ConfigTypeError:")
    assert fragment in line


def test_missing_scene_image_exits_1(tmp_path, capsys):
    scenes = tmp_path / "scenes"
    assert cli(["synth", "--out", str(scenes), "--n-images", "2"]) == 0
    next((scenes / "images").glob("*.npy")).unlink()
    code = cli(["train", "--data", str(scenes), "--out", str(tmp_path / "run")])
    assert code == 1
    assert _error_line(capsys).startswith("paxkit: error: CheckpointMismatch:")


def test_log_json_writes_jsonl_run_log(tmp_path):
    log_dir = tmp_path / "cli-logs"
    argv = ["--log-dir", str(log_dir), "--log-json", "axis-demo", "--theta", "0", "--csv", str(tmp_path / "axis.csv")]
    assert cli(argv) == 0
    runs = list((log_dir / "axis_demo").glob("*.jsonl"))
    assert len(runs) == 1
    first = msgspec.json.decode(runs[0].read_text(encoding="utf-8").splitlines()[0])
    assert set(first) == {"level", "text"}
    assert not list((log_dir / "axis_demo").glob("*[0-9].log"))
