"""
Configuration Loading and Management

This module handles centralized configuration management.
Priority: Runtime Config (command-line flags) > User Config File > Default Config

The defaults live in defaults.json next to this module. User config files are
key=value lines with # comments, keys in dot notation ("model.lambda=0.05");
a bare model key ("gamma=1.0") is read as model.<key>.
"""
import json
import logging
import os
from typing import Any, Dict, Optional, Set

from dotenv import dotenv_values

from domain.errors import DataValidationError

CONFIG_ENV_VAR = "JDZSL_CONFIG"
_NONE_WORDS = {"", "none", "null"}
_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


class ConfigLoader:
    """Configuration loading and management class"""

    def __init__(self, config_path: Optional[str] = None):
        self.logger = logging.getLogger(__name__)
        self.config = self._get_default_config()
        self.runtime_config: Dict[str, Any] = {}
        self.explicit_keys: Set[str] = set()
        config_path = config_path or os.environ.get(CONFIG_ENV_VAR)
        if config_path:
            self.load_user_config(config_path)

    def _get_default_config(self) -> Dict[str, Any]:
        defaults_path = os.path.join(os.path.dirname(__file__), 'defaults.json')
        try:
            with open(defaults_path, 'r', encoding='utf-8') as f:
                default_config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.logger.error("FATAL: Cannot load required configuration file: %s", defaults_path)
            raise FileNotFoundError(f"Required configuration file not found: {defaults_path}") from e

        self.logger.debug("Loaded default configuration from %s with %d sections",
                          defaults_path, len(default_config))
        return default_config

    def load_user_config(self, file_path: str) -> None:
        """
        Merge a key=value config file over the defaults

        Raises:
            DataValidationError: When the file is missing, or names an unknown key or a bad value
        """
        if not os.path.exists(file_path):
            raise DataValidationError(f"Config file not found: {file_path}")
        entries = dotenv_values(file_path)
        for key, raw in entries.items():
            dotted = self.resolve_key(key)
            section, name = dotted.split('.', 1)
            self.config[section][name] = self.coerce(dotted, raw)
            self.explicit_keys.add(dotted)
        self.logger.info("Loaded config from %s (%d keys)", file_path, len(entries))

    def resolve_key(self, key: str) -> str:
        """Map a config key onto its dotted path, rejecting unknown keys"""
        key = key.strip()
        if '.' not in key and key in self.config.get("model", {}):
            key = f"model.{key}"
        section, _, name = key.partition('.')
        if section not in self.config or not isinstance(self.config[section], dict) or name not in self.config[section]:
            raise DataValidationError(f"Unknown configuration key: {key}")
        return key

    def coerce(self, key: str, raw: Optional[str]) -> Any:
        """Convert a string value to the type of the default it overrides"""
        default = self.get_default(key)
        text = "" if raw is None else str(raw).strip()
        try:
            if isinstance(default, bool):
                lowered = text.lower()
                if lowered in _TRUE_WORDS:
                    return True
                if lowered in _FALSE_WORDS:
                    return False
                raise ValueError(text)
            if isinstance(default, int):
                return int(text)
            if isinstance(default, float) or default is None:
                return None if text.lower() in _NONE_WORDS else float(text)
            if isinstance(default, list):
                cast = float if any(isinstance(item, float) for item in default) else int
                return [cast(item) for item in text.split(',') if item.strip()]
            return text
        except ValueError as e:
            raise DataValidationError(f"Invalid value for {key}: {raw!r}") from e

    def get_default(self, key: str) -> Any:
        value: Any = self.config
        for part in key.split('.'):
            value = value[part]
        return value

    def set_runtime(self, key: str, value: Any) -> None:
        """
        Add runtime configuration (command-line flags)

        Args:
            key: Configuration key (dot notation supported: "model.lambda")
            value: Configuration value
        """
        dotted = self.resolve_key(key)
        self.runtime_config[dotted] = value
        self.explicit_keys.add(dotted)
        self.logger.debug("Runtime config set: %s = %s", key, value)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value for specific key
        Priority: Runtime Config > User Config File > Default Config

        Args:
            key: Configuration key (dot notation supported: "model.lambda");
                 a section key returns the merged section
            default: Default value

        Returns:
            Configuration value
        """
        if key in self.runtime_config:
            return self.runtime_config[key]

        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        if isinstance(value, dict):
            prefix = key + '.'
            overrides = {k[len(prefix):]: v for k, v in self.runtime_config.items() if k.startswith(prefix)}
            value = {**value, **overrides}
        return value

    def explicit(self, section: str) -> Dict[str, Any]:
        """Values of a section set by the user config file or at runtime, not by the defaults"""
        prefix = section + '.'
        return {key[len(prefix):]: self.get(key) for key in sorted(self.explicit_keys) if key.startswith(prefix)}
