import pathlib
from typing import Any

import pytest
import yaml

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


class DummyLogger:
    """Stand-in for the async logger; keeps records so tests can inspect them."""

    def __init__(self):
        self.records: list[tuple[str, str]] = []

    def _log(self, level: str, message: Any) -> None:
        self.records.append((level, str(message)))

    def trace(self, message: Any, *args: Any, **kwargs: Any) -> None:
        self._log("trace", message)

    def debug(self, message: Any, *args: Any, **kwargs: Any) -> None:
        self._log("debug", message)

    def info(self, message: Any, *args: Any, **kwargs: Any) -> None:
        self._log("info", message)

    def warning(self, message: Any, *args: Any, **kwargs: Any) -> None:
        self._log("warning", message)

    def error(self, message: Any, *args: Any, **kwargs: Any) -> None:
        self._log("error", message)

    def messages(self, level: str) -> list[str]:
        return [m for lvl, m in self.records if lvl == level]


@pytest.fixture
def dummy_logger() -> DummyLogger:
    return DummyLogger()


@pytest.fixture(scope="session")
def oracles():
    with (FIXTURES / "oracles.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f)


@pytest.fixture(scope="session")
def golden_dota_path() -> pathlib.Path:
    return FIXTURES / "golden.txt"


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    monkeypatch.delenv("PAXKIT_SEED", raising=False)
    monkeypatch.setenv("PAXKIT_LOG_DIR", str(tmp_path / "logs"))
