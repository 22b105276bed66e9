"""
Runtime settings for liedim.

Settings come from the process environment after ``config/.env`` has been
loaded (when it exists). Command-line flags override them.
"""
import os
import logging
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel

from src.utils.error_handling import ConfigurationError

logger = logging.getLogger(__name__)

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "config")
ENV_PATH = os.path.join(CONFIG_DIR, ".env")


class Settings(BaseModel):
    """Model for liedim settings."""
    seed: int = 0
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    json_logs: bool = False
    trials: int = 20  # instances per randomized family in `check`


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(
            f"{name} must be an integer, got {raw!r}",
            details={"variable": name, "value": raw}
        )


def _bool_env(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(
        f"{name} must be a boolean, got {raw!r}",
        details={"variable": name, "value": raw}
    )


def load_settings(env_path: Optional[str] = None) -> Settings:
    """
    Load settings from the environment.

    Args:
        env_path: Optional path of a dotenv file; defaults to config/.env

    Returns:
        Settings: The resolved settings

    Raises:
        ConfigurationError: If a variable is malformed
    """
    path = env_path or ENV_PATH
    if os.path.exists(path):
        load_dotenv(path, override=False)
        logger.debug(f"Loaded environment from {path}")

    trials = _int_env("LIEDIM_TRIALS", 20)
    if trials < 1:
        raise ConfigurationError("LIEDIM_TRIALS must be positive", details={"value": trials})

    return Settings(
        seed=_int_env("LIEDIM_SEED", 0),
        log_level=os.getenv("LIEDIM_LOG_LEVEL", "WARNING").upper(),
        log_file=os.getenv("LIEDIM_LOG_FILE") or None,
        json_logs=_bool_env("LIEDIM_JSON_LOGS", False),
        trials=trials,
    )
