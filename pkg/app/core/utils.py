"""
Utility functions shared across applications.
"""
import json
import re
from pathlib import Path
from typing import Any, Dict, Mapping, Union

import numpy as np
import unidecode
import yaml


def slugify_name(name: str) -> str:
    """Generate a filesystem-safe slug from a category name."""
    # Convert to ASCII and lowercase
    slug = unidecode.unidecode(name).lower()

    # Replace spaces and special characters with hyphens
    slug = re.sub(r'[^a-z0-9]+', '-', slug)

    slug = slug.strip('-')

    return slug[:50] or 'category'


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from zero for positives."""
    return int(np.floor(value + 0.5))


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """Write a JSON document with stable key order and a trailing newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    return path


def read_json(path: Union[str, Path]) -> Any:
    """Parse a JSON document; undecodable files raise ManifestFormatError."""
    from .exceptions import ManifestFormatError

    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except ValueError as exc:
        raise ManifestFormatError(f"{path} is not a valid JSON document: {exc}", path=str(path)) from exc


def load_config_file(path: Union[str, Path, None]) -> Dict[str, Any]:
    """
    Load a run configuration file.

    JSON is the documented syntax; YAML is accepted because it is a superset.

    Args:
        path: Config file path, or None for an empty configuration

    Returns:
        Parsed mapping
    """
    if path is None:
        return {}
    data = yaml.safe_load(Path(path).read_text(encoding='utf-8'))
    if data is None:
        return {}
    if not isinstance(data, Mapping):
        from .exceptions import InvalidConfigError
        raise InvalidConfigError(f"Configuration {path} must be a mapping", path=str(path))
    return dict(data)
