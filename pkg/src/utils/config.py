"""
Configuration utilities
"""

import os
from typing import Any, Callable, Dict, Optional

from src.utils.env_loader import load_config_file
from src.utils.helpers import (
    parse_float_list,
    parse_int_list,
    parse_matrix_list,
    parse_str_list,
)

ENV_PREFIX = "ARCLUST_"


def _parse_optional_float(text: str) -> Optional[float]:
    if text.strip().lower() in ("", "auto", "none"):
        return None
    return float(text)


def _parse_optional_int(text: str) -> Optional[int]:
    if text.strip().lower() in ("", "auto", "none"):
        return None
    return int(text)


def _parse_optional_str(text: str) -> Optional[str]:
    text = text.strip()
    return text or None


def _parse_bool(text: str) -> bool:
    return text.strip().lower() in ["true", "1", "yes", "on"]


# Typed configuration keys. Anything not listed here is rejected.
CONFIG_SCHEMA: Dict[str, Callable[[str], Any]] = {
    # run settings
    "seed": _parse_optional_int,
    "restarts": int,
    "tau": float,
    "epsilon": _parse_optional_float,
    "n_jobs": int,
    "output_dir": str,
    "log_level": str,
    "log_dir": _parse_optional_str,
    "d_prime": _parse_optional_int,
    "baseline": _parse_bool,
    # synthetic rings
    "ring_radii": parse_float_list,
    "ring_width": float,
    # data roles
    "input": _parse_optional_str,
    "id_column": _parse_optional_str,
    "x_columns": parse_str_list,
    "protected_columns": parse_str_list,
    "class_column": _parse_optional_str,
    "codification": _parse_optional_str,
    "lat_column": _parse_optional_str,
    "lon_column": _parse_optional_str,
    "distance": str,
    # clustering
    "methods": parse_str_list,
    "k": parse_int_list,
    # dissimilarity family and parameter grid
    "family": _parse_optional_str,
    "u": parse_float_list,
    "v": parse_float_list,
    "w": parse_float_list,
    "v0": parse_float_list,
    "u_matrix": parse_matrix_list,
    "v_matrix": parse_matrix_list,
    "v_tilde": parse_matrix_list,
    # kernel
    "kernel": _parse_optional_str,
    "kernel_degree": int,
    "kernel_coef": float,
    "kernel_gamma": float,
}


DEFAULTS: Dict[str, Any] = {
    "seed": None,
    "restarts": 20,
    "tau": 0.0,
    "epsilon": None,
    "n_jobs": 1,
    "output_dir": "results",
    "log_level": "INFO",
    "log_dir": None,
    "d_prime": None,
    "baseline": True,
    "ring_radii": [1.0, 2.0, 3.0],
    "ring_width": 0.4,
    "input": None,
    "id_column": None,
    "x_columns": [],
    "protected_columns": [],
    "class_column": None,
    "codification": None,
    "lat_column": None,
    "lon_column": None,
    "distance": "euclidean",
    "methods": ["complete", "average", "single", "kmeans_mds", "kmedoids_mds"],
    "k": [2],
    "family": None,
    "u": [],
    "v": [],
    "w": [],
    "v0": [],
    "u_matrix": [],
    "v_matrix": [],
    "v_tilde": [],
    "kernel": None,
    "kernel_degree": 2,
    "kernel_coef": 1.0,
    "kernel_gamma": 1.0,
}


def coerce_value(key: str, raw: str) -> Any:
    """
    Convert a raw configuration string to the type registered for its key

    Args:
        key: Configuration key
        raw: Raw text value

    Returns:
        Typed value

    Raises:
        ValueError: If the key is unknown or the value does not parse
    """
    if key not in CONFIG_SCHEMA:
        raise ValueError(f"Unknown configuration key: {key}")
    try:
        return CONFIG_SCHEMA[key](raw)
    except ValueError as e:
        raise ValueError(f"Invalid value for '{key}': {raw!r} ({e})")


def load_config(
    path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    Load run configuration

    Later sources win: built-in defaults, then ARCLUST_* environment
    variables, then the key/value file at `path`, then `overrides`
    (already typed, e.g. from command-line flags; None values are ignored).

    Args:
        path: Optional configuration file
        overrides: Optional typed overrides

    Returns:
        Configuration dictionary
    """
    config = dict(DEFAULTS)

    for key in CONFIG_SCHEMA:
        value = os.getenv(ENV_PREFIX + key.upper())
        if value is not None:
            config[key] = coerce_value(key, value)

    if path:
        for key, raw in load_config_file(path).items():
            config[key] = coerce_value(key, raw)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CONFIG_SCHEMA:
            raise ValueError(f"Unknown configuration key: {key}")
        config[key] = value

    _validate_config(config)
    return config


def _validate_config(config: Dict[str, Any]) -> None:
    if config["restarts"] < 1:
        raise ValueError("restarts must be >= 1")
    if config["n_jobs"] < 1:
        raise ValueError("n_jobs must be >= 1")
    if config["epsilon"] is not None and config["epsilon"] <= 0:
        raise ValueError("epsilon must be > 0")
    if config["d_prime"] is not None and config["d_prime"] < 1:
        raise ValueError("d_prime must be >= 1")
    if config["distance"] not in ("euclidean", "geodesic"):
        raise ValueError(
            f"distance must be 'euclidean' or 'geodesic', got {config['distance']!r}"
        )
    if any(k < 2 for k in config["k"]):
        raise ValueError("k must be >= 2")
    radii = config["ring_radii"]
    if len(radii) != 3 or not 0 < radii[0] < radii[1] < radii[2]:
        raise ValueError("ring_radii must be three increasing positive values")
    if config["ring_width"] <= 0:
        raise ValueError("ring_width must be > 0")


def format_config(config: Dict[str, Any]) -> str:
    """
    Render a configuration back to `key = value` text

    Args:
        config: Configuration dictionary

    Returns:
        Text accepted by load_config
    """
    lines = []
    for key in CONFIG_SCHEMA:
        value = config.get(key)
        if value is None:
            text = "auto" if key in ("epsilon", "d_prime") else "none" if key == "seed" else ""
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, list):
            separator = " | " if key in ("u_matrix", "v_matrix", "v_tilde") else ", "
            text = separator.join(str(item) for item in value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"

