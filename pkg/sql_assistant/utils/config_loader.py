# utils/config_loader.py
from pathlib import Path
import os

import yaml
from dotenv import load_dotenv

from sql_assistant.exception.custom_exception import ConfigError


def _project_root() -> Path:
    # .../utils/config_loader.py -> parents[1] == package root
    return Path(__file__).resolve().parents[1]


def config_dir() -> Path:
    return _project_root() / "config"


def load_yaml(path: str | Path) -> dict:
    """Read a YAML mapping; an empty file yields an empty dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}", e) from e
    if not isinstance(data, dict):
        raise ConfigError(f"Expected a key/value mapping in {path}")
    return data


def load_config(config_path: str | None = None) -> dict:
    """
    Resolve config path reliably irrespective of CWD.
    Priority: explicit arg > CONFIG_PATH env > <package_root>/config/config.yaml
    """
    load_dotenv()
    env_path = os.getenv("CONFIG_PATH")
    if config_path is None:
        config_path = env_path or str(config_dir() / "config.yaml")

    path = Path(config_path)
    if not path.is_absolute():
        path = _project_root() / path

    return load_yaml(path)
