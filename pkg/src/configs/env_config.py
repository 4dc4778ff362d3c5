"""Environment variable loading and validation helpers."""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from utils.errors import ConfigTypeError

load_dotenv()

DEFAULT_LOG_DIR = "logs"


class Env:
    """Namespace for environment configuration values.

    Values are read on access so tests can patch the environment.
    """

    SEED_VAR = "PAXKIT_SEED"
    LOG_DIR_VAR = "PAXKIT_LOG_DIR"

    @classmethod
    def seed(cls) -> Optional[int]:
        """Seed override, or ``None`` when ``PAXKIT_SEED`` is unset or empty.

        :raises ConfigTypeError: If the variable is not an integer.
        """

        raw = os.getenv(cls.SEED_VAR, "").strip()
        if not raw:
            return None
        try:
            return int(raw)
        except ValueError:
            raise ConfigTypeError(f"{cls.SEED_VAR} must be an integer, got {raw!r}") from None

    @classmethod
    def log_dir(cls) -> Path:
        return Path(os.getenv(cls.LOG_DIR_VAR) or DEFAULT_LOG_DIR)
