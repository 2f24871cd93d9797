import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from .errors import ConfigError
from .lab_config import get_default_config

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "RIPSLAB_CONFIG"


def _default_config_path() -> Path:
    return Path(__file__).parent.parent.absolute() / "config" / "lab.json"


def load_lab_config(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Load the laboratory defaults from a JSON file.

    The lookup order is: explicit ``path``, then ``$RIPSLAB_CONFIG``, then
    ``config/lab.json`` next to the package. Sections missing from the file are
    filled from the built-in defaults.

    Returns:
        dict: section name -> settings
    """
    explicit = path or os.getenv(CONFIG_ENV_VAR)
    config_path = Path(explicit) if explicit else _default_config_path()
    merged = get_default_config()

    if not config_path.exists():
        if explicit:
            raise FileNotFoundError(f"Lab configuration file not found at {config_path}")
        logger.debug(f"No lab configuration at {config_path}; using built-in defaults")
        return merged

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            loaded = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Error parsing lab configuration {config_path}: {e}")

    for section, values in loaded.items():
        if not isinstance(values, dict):
            raise ValueError(f"Section '{section}' in {config_path} must be an object")
        merged.setdefault(section, {}).update(values)
    return merged


@lru_cache(maxsize=1)
def _cached_config() -> Dict[str, Dict[str, Any]]:
    return load_lab_config()


def get_setting(section: str, key: str) -> Any:
    """Get one default setting, e.g. ``get_setting("geometry", "probes")``."""
    try:
        return _cached_config()[section][key]
    except KeyError:
        raise KeyError(f"Unknown setting {section}.{key}")


def reload_config() -> None:
    """Drop the cached defaults so the next lookup re-reads the file."""
    _cached_config.cache_clear()


def _coerce(raw: str) -> Any:
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", "null", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if "," in text:
        return [_coerce(part) for part in text.split(",") if part.strip()]
    return text


def load_key_value_file(path: str) -> Dict[str, Any]:
    """
    Read a run configuration file.

    ``key = value`` per line with ``#`` comments; keys are the long CLI flag
    names (``dim-cap`` and ``dim_cap`` are equivalent). Comma-separated values
    become lists. A ``.json`` file is read as a flat JSON object instead.
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")

    if config_path.suffix.lower() == ".json":
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Error parsing {config_path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path} must hold a JSON object")
        return {str(k).replace("-", "_"): v for k, v in data.items()}

    values: Dict[str, Any] = {}
    with open(config_path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{config_path}:{lineno}: expected 'key = value', got {stripped!r}")
            key, raw = stripped.split("=", 1)
            values[key.strip().replace("-", "_")] = _coerce(raw)
    return values
