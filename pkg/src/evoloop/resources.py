"""Access to bundled fixture files.

Config values may reference a bundled fixture as ``builtin:<name>``
(e.g. ``builtin:apis.json``) instead of a filesystem path.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import ConfigError

BUILTIN_PREFIX = "builtin:"


def fixture_path(name: str) -> Path:
    path = Path(str(resources.files("evoloop").joinpath("fixtures", name)))
    if not path.exists():
        raise ConfigError(f"no bundled fixture named '{name}'")
    return path


def resolve_path(value: str) -> Path:
    """Resolve a config path value, expanding the builtin: scheme."""
    if value.startswith(BUILTIN_PREFIX):
        return fixture_path(value[len(BUILTIN_PREFIX):])
    return Path(value)
