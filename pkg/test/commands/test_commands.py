import pandas as pd
import pytest

import verify
from commands import COMMANDS
from commands import axis_demo, synth
from commands import verify as verify_command
from cli import build_parser, command_kwargs, resolve_command, run_command
from data import load_scene_dir
from model.records import PropertyResult
from utils.errors import UsageError, VerificationFailed


async def test_synth_is_deterministic(tmp_path, dummy_logger):
    a = await synth.run(out=str(tmp_path / "a"), seed=3, n_images=2, logger=dummy_logger)
    b = await synth.run(out=str(tmp_path / "b"), seed=3, n_images=2, logger=dummy_logger)
    for name in ("train_0000", "train_0001"):
        assert (a / "labelTxt" / f"{name}.txt").read_bytes() == (b / "labelTxt" / f"{name}.txt").read_bytes()
        assert (a / "images" / f"{name}.npy").read_bytes() == (b / "images" / f"{name}.npy").read_bytes()
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    assert any(m.startswith("wrote 2 scenes") for m in dummy_logger.messages("info"))


async def test_synth_seed_falls_back_to_environment(tmp_path, monkeypatch, dummy_logger):
    monkeypatch.setenv("PAXKIT_SEED", "17")
    root = await synth.run(out=str(tmp_path / "s"), n_images=1, split="val", classes=["car", "truck"], logger=dummy_logger)
    manifest = load_scene_dir(root).manifest
    assert (manifest.seed, manifest.split) == (17, "val")
    assert manifest.params.classes == ("car", "truck")


@pytest.mark.parametrize("kwargs", [{"out": None}, {"out": "x", "split": "test"}, {"out": "x", "max_objects": 0}])
async def test_synth_usage_errors(tmp_path, dummy_logger, kwargs):
    if kwargs.get("out"):
        kwargs["out"] = str(tmp_path / kwargs["out"])
    with pytest.raises(UsageError):
        await synth.run(logger=dummy_logger, **kwargs)


async def test_axis_demo_prints_four_peaks(capsys, dummy_logger):
    encoding = await axis_demo.run(theta=0.0, sigma=0.0, logger=dummy_logger)
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "theta=0 n_bins=360 sigma=0"
    assert lines[1] == "encoding: 0:1.0000 90:1.0000 180:1.0000 270:1.0000"
    assert lines[2] == "principal=0.0000 directions=[0.0000, 90.0000, 180.0000, 270.0000] box_angle=0.0000"
    assert encoding.values.sum() == 4.0


async def test_axis_demo_decodes_45_degrees(capsys, dummy_logger):
    await axis_demo.run(theta=45.0, logger=dummy_logger)
    assert "principal=45.0000" in capsys.readouterr().out


async def test_axis_demo_csv(tmp_path, dummy_logger):
    path = tmp_path / "demo" / "axis.csv"
    await axis_demo.run(theta=30.0, n_bins=72, sigma=1.0, csv_path=str(path), logger=dummy_logger)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["bin", "degrees", "value"]
    assert len(frame) == 72
    assert frame["degrees"].iloc[1] == pytest.approx(5.0)


@pytest.mark.parametrize("kwargs", [{"theta": None}, {"theta": float("nan")}, {"theta": 0.0, "n_bins": 30}, {"theta": 0.0, "sigma": -1.0}])
async def test_axis_demo_usage_errors(dummy_logger, kwargs):
    with pytest.raises(UsageError):
        await axis_demo.run(logger=dummy_logger, **kwargs)


async def test_verify_command_reports(capsys, dummy_logger):
    report = await verify_command.run(suite="codec", quick=True, seed=5, logger=dummy_logger)
    out = capsys.readouterr().out
    assert list(report) == ["codec"]
    assert out.strip().splitlines()[-1].endswith("properties passed")
    assert "FAIL" not in out


async def test_verify_command_raises_on_failure(monkeypatch, capsys, dummy_logger):
    monkeypatch.setitem(verify.SUITES, "codec", lambda quick, seed: [PropertyResult("broken", False, 1.0, 0.0, 1)])
    with pytest.raises(VerificationFailed) as info:
        await verify_command.run(suite="codec", logger=dummy_logger)
    assert info.value.failing == ["broken"]
    assert "FAIL codec.broken" in capsys.readouterr().out
    assert dummy_logger.messages("error")


def test_every_command_resolves_to_a_coroutine():
    for name in COMMANDS:
        assert resolve_command(name).__name__ == "run"
    with pytest.raises(UsageError):
        resolve_command("deploy")


def test_parser_builds_command_kwargs():
    args = build_parser().parse_args(["--log-level", "debug", "axis-demo", "--theta", "12.5", "--csv", "out.csv"])
    assert args.command == "axis-demo"
    assert command_kwargs(args) == {"theta": 12.5, "n_bins": 360, "sigma": 6.0, "csv_path": "out.csv"}


async def test_run_command_injects_a_logger(tmp_path, capsys):
    encoding = await run_command("axis-demo", {"theta": 90.0}, log_dir=tmp_path)
    assert encoding.n_bins == 360
    assert (tmp_path / "axis_demo").is_dir()
    assert "principal=0.0000" in capsys.readouterr().out


async def test_run_command_logs_and_reraises(tmp_path):
    with pytest.raises(UsageError):
        await run_command("axis-demo", {"theta": None}, log_dir=tmp_path)
    error_logs = list((tmp_path / "axis_demo").glob("*.error.log"))
    assert error_logs and "UsageError" in error_logs[0].read_text(encoding="utf-8")
