"""API registry: spec records and their file loader.

Registry file format: a JSON list of
``{name, description, params: [{name, type, required, description}], handler_id}``.
The registry is immutable after load and freely shared between sessions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FormatError, ValidationError
from .handlers import HANDLERS

PARAM_TYPES = ("string", "number", "boolean")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str
    required: bool
    description: str = ""


@dataclass(frozen=True)
class ApiSpec:
    name: str
    description: str
    params: tuple[ParamSpec, ...] = field(default_factory=tuple)
    handler_id: str = ""


def _parse_param(api_name: str, raw: dict) -> ParamSpec:
    try:
        name = raw["name"]
        type_tag = raw["type"]
        required = raw["required"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"api '{api_name}': malformed param record: {raw!r}") from exc
    if type_tag not in PARAM_TYPES:
        raise ValidationError(
            f"api '{api_name}': param '{name}' has unknown type '{type_tag}' "
            f"(expected one of {', '.join(PARAM_TYPES)})"
        )
    return ParamSpec(name=name, type=type_tag, required=bool(required),
                     description=raw.get("description", ""))


def _parse_spec(raw: dict) -> ApiSpec:
    try:
        name = raw["name"]
        handler_id = raw["handler_id"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed api record: {raw!r}") from exc
    if handler_id not in HANDLERS:
        raise ValidationError(f"api '{name}': unknown handler_id '{handler_id}'")
    params = tuple(_parse_param(name, p) for p in raw.get("params", []))
    seen = set()
    for p in params:
        if p.name in seen:
            raise ValidationError(f"api '{name}': duplicate param '{p.name}'")
        seen.add(p.name)
    return ApiSpec(name=name, description=raw.get("description", ""),
                   params=params, handler_id=handler_id)


def registry_load(bundle_path: str | Path) -> list[ApiSpec]:
    """Load and validate an API registry file.

    Duplicate api names are rejected; an empty list is valid (downstream
    sampling refuses to run on it).
    """
    path = Path(bundle_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read registry file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"registry file {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(data, list):
        raise FormatError(f"registry file {path}: top level must be a JSON list")

    specs = [_parse_spec(raw) for raw in data]
    names = set()
    for spec in specs:
        if spec.name in names:
            raise ValidationError(f"duplicate api name '{spec.name}' in registry")
        names.add(spec.name)
    return specs


def registry_by_name(registry: list[ApiSpec]) -> dict[str, ApiSpec]:
    return {spec.name: spec for spec in registry}
