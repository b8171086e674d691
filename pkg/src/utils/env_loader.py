"""
Flat configuration file loader
Parses `key = value` files (pipeline configs, preset grids) and .env files
"""

import os
from pathlib import Path
from typing import Dict


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    """
    Parse `key = value` lines into a dictionary of raw strings

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        Mapping of lower-cased keys to unquoted values

    Raises:
        ValueError: If a non-comment line has no '=' or a key repeats
    """
    values: Dict[str, str] = {}

    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()

        # Skip empty lines and comments
        if not line or line.startswith("#"):
            continue

        if "=" not in line:
            raise ValueError(f"{source}:{line_number}: expected 'key = value'")

        key, value = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        value = value.strip()

        # Remove quotes if present
        if value.startswith('"') and value.endswith('"'):
            value = value[1:-1]
        elif value.startswith("'") and value.endswith("'"):
            value = value[1:-1]

        if key in values:
            raise ValueError(f"{source}:{line_number}: duplicate key '{key}'")
        values[key] = value

    return values


def load_config_file(path: str) -> Dict[str, str]:
    """
    Load a flat configuration file

    Args:
        path: Path to the file

    Returns:
        Raw key/value strings (typing is applied by src.utils.config)
    """
    config_file = Path(path)
    if not config_file.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")

    with open(config_file, "r", encoding="utf-8") as f:
        return parse_key_values(f.read(), source=str(config_file))


def load_env_file(env_path: str = ".env") -> bool:
    """
    Load environment variables from .env file

    Args:
        env_path: Path to the .env file

    Returns:
        True if file was loaded successfully, False otherwise
    """
    env_file = Path(env_path)

    if not env_file.exists():
        return False

    try:
        with open(env_file, "r", encoding="utf-8") as f:
            entries = parse_key_values(f.read(), source=str(env_file))
    except (OSError, ValueError) as e:
        print(f"Warning: Could not load .env file: {e}")
        return False

    for key, value in entries.items():
        # Only set if not already in environment
        env_key = key.upper()
        if env_key not in os.environ:
            os.environ[env_key] = value

    return True


def ensure_env_loaded():
    """
    Ensure environment variables are loaded from .env file
    This should be called at the start of the application
    """
    load_env_file()
