"""
Flat JSON configuration files.

A configuration file is a single JSON object whose keys are CLI option
names (dashes or underscores) and whose values are scalars or lists.
Values are used as defaults: explicit command-line flags win.
"""

from pathlib import Path
from typing import Any, Dict, Union
import json
import logging

from pydaar.core.exceptions import ConfigError

logger = logging.getLogger(__name__)


def load_config(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat configuration object.

    Returns:
        Mapping from option name (underscored) to value; lists are joined
        with commas so they read like the corresponding flag

    Raises:
        ConfigError: If the file is not a flat JSON object
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read configuration {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"Configuration {path} must be a JSON object")

    config: Dict[str, Any] = {}
    for key, value in document.items():
        if isinstance(value, dict):
            raise ConfigError(f"Configuration key '{key}' must not be a nested object")
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        config[str(key).replace("-", "_")] = value
    logger.debug("Loaded %d configuration key(s) from %s", len(config), path)
    return config
