"""
Config-file layer for the CLI.

A config file is YAML whose top-level keys are subcommand names, each mapping
flag names to defaults::

    solve:
      tol: 1.0e-10
      max_iter: 500
    bench:
      trials: 20

It becomes click's ``default_map``, so explicit flags always win.
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from ..exceptions import FileFormatError

CONFIG_ENV_VAR = "GTE_LM_CONFIG"
SUBCOMMANDS = ("generate", "solve", "classify", "bench", "trace")


def load_environment():
    """Read a ``.env`` file from the working directory, if any."""
    load_dotenv()


def resolve_config_path(explicit: Optional[str]) -> Optional[Path]:
    if explicit:
        return Path(explicit)
    from_env = os.getenv(CONFIG_ENV_VAR)
    return Path(from_env) if from_env else None


def load_config(path: Optional[Path]) -> Dict[str, Dict[str, Any]]:
    """Parse and validate a config file into a click ``default_map``."""
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise FileFormatError(path, None, f"invalid YAML: {e}") from e

    if not isinstance(data, dict):
        raise FileFormatError(path, None, "config must be a mapping of subcommand -> options")

    default_map: Dict[str, Dict[str, Any]] = {}
    for section, options in data.items():
        if section not in SUBCOMMANDS:
            raise FileFormatError(path, None, f"unknown section {section!r}; expected one of {', '.join(SUBCOMMANDS)}")
        if not isinstance(options, dict):
            raise FileFormatError(path, None, f"section {section!r} must be a mapping")
        default_map[section] = {str(k).replace("-", "_"): v for k, v in options.items()}
    return default_map
