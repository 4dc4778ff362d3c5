import pytest
import yaml

from configs.env_config import Env
from configs.run_config import KEYS, build_run_config, flatten_run_config, load_run_config, parse_flag, with_overrides
from model.config import RunConfig
from utils.errors import ConfigTypeError, InvalidConfig, UnknownKey


def _write(tmp_path, values) -> str:
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(values), encoding="utf-8")
    return str(path)


def test_default_config_matches_dataclass_defaults():
    assert load_run_config() == RunConfig()


def test_default_config_declares_every_key():
    from configs.run_config import DEFAULT_CONFIG

    with DEFAULT_CONFIG.open(encoding="utf-8") as f:
        assert set(yaml.safe_load(f)) == set(KEYS)


def test_flat_keys_route_to_their_sections(tmp_path):
    cfg = load_run_config(_write(tmp_path, {"K": 9, "dim": 32, "n_heads": 2, "sigma": 0, "lr": "0.01", "epochs": 3, "decay_epochs": [1, 2]}))
    assert cfg.model.K == 9
    assert cfg.model.attention.dim == 32
    assert cfg.model.attention.n_heads == 2
    assert cfg.codec.sigma == 0.0
    assert cfg.optimizer.lr == 0.01
    assert cfg.optimizer.decay_epochs == (1, 2)
    assert cfg.train.epochs == 3


def test_unknown_key(tmp_path):
    with pytest.raises(UnknownKey) as info:
        load_run_config(_write(tmp_path, {"learning_rate": 0.1}))
    assert info.value.key == "learning_rate"
    assert str(info.value) == "unknown config key 'learning_rate'"


@pytest.mark.parametrize("values", [{"K": "many"}, {"use_point_queries": "maybe"}, {"lr": True}])
def test_type_errors(values):
    with pytest.raises(ConfigTypeError):
        build_run_config(values)


def test_invariants_are_checked_after_assembly():
    with pytest.raises(InvalidConfig):
        build_run_config({"K": 4})
    with pytest.raises(InvalidConfig):
        build_run_config({"use_point_queries": False})


def test_non_mapping_file(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigTypeError):
        load_run_config(path)


def test_seed_comes_from_the_environment(monkeypatch, tmp_path):
    path = _write(tmp_path, {"seed": 3})
    assert load_run_config(path).train.seed == 3
    monkeypatch.setenv(Env.SEED_VAR, "41")
    assert load_run_config(path).train.seed == 41
    assert load_run_config(path, use_env=False).train.seed == 3
    monkeypatch.setenv(Env.SEED_VAR, "forty")
    with pytest.raises(ConfigTypeError):
        load_run_config(path)


def test_log_dir_from_environment(monkeypatch, tmp_path):
    assert Env.log_dir() == tmp_path / "logs"
    monkeypatch.delenv(Env.LOG_DIR_VAR)
    assert str(Env.log_dir()) == "logs"


def test_flatten_rebuilds_the_same_config():
    cfg = build_run_config({"K": 7, "variant": "top_k", "top_k": 2, "n_bins": 72, "epochs": 5})
    flat = flatten_run_config(cfg)
    assert set(flat) == set(KEYS)
    assert build_run_config(flat) == cfg
    assert build_run_config(yaml.safe_load(yaml.safe_dump(flat))) == cfg


def test_with_overrides_only_touches_training():
    cfg = with_overrides(RunConfig(), epochs=2, threads=3)
    assert (cfg.train.epochs, cfg.train.threads) == (2, 3)
    assert cfg.model == RunConfig().model


@pytest.mark.parametrize("value, expected", [(True, True), ("yes", True), (" OFF ", False), ("0", False)])
def test_parse_flag(value, expected):
    assert parse_flag(value) is expected


@pytest.mark.parametrize("value", ["maybe", 1, None])
def test_parse_flag_rejects_ambiguous(value):
    with pytest.raises(ValueError):
        parse_flag(value)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigTypeError, match="cannot read config"):
        load_run_config(tmp_path / "nope.yaml")


def test_malformed_yaml_reports_position(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("epochs: 3\nK: [5\n", encoding="utf-8")
    with pytest.raises(ConfigTypeError, match=r"invalid YAML \(line \d+, column \d+: "):
        load_run_config(path)
