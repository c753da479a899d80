"""Instruction records and their file loader.

Instruction file format: a JSON list of
``{id, text, relevant_apis, checker: {kind, truth, tolerance?}, split}``.
The train/eval split is fixed in the file and never recomputed at runtime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import FormatError, ValidationError

CHECKER_KINDS = ("exact", "numeric", "substring_set")
SPLITS = ("train", "eval")


@dataclass(frozen=True)
class Checker:
    kind: str
    truth: object
    tolerance: float = 1e-6


@dataclass(frozen=True)
class Instruction:
    id: str
    text: str
    relevant_apis: tuple[str, ...]
    checker: Checker
    split: str


def _parse_checker(instr_id: str, raw: dict) -> Checker:
    try:
        kind = raw["kind"]
        truth = raw["truth"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"instruction '{instr_id}': malformed checker: {raw!r}") from exc
    if kind not in CHECKER_KINDS:
        raise ValidationError(
            f"instruction '{instr_id}': unknown checker kind '{kind}' "
            f"(expected one of {', '.join(CHECKER_KINDS)})"
        )
    if kind == "numeric" and not isinstance(truth, (int, float)):
        raise ValidationError(f"instruction '{instr_id}': numeric checker truth must be a number")
    if kind == "substring_set" and (not isinstance(truth, list) or not truth):
        raise ValidationError(
            f"instruction '{instr_id}': substring_set checker truth must be a non-empty list"
        )
    return Checker(kind=kind, truth=truth, tolerance=float(raw.get("tolerance", 1e-6)))


def _parse_instruction(raw: dict) -> Instruction:
    try:
        instr_id = raw["id"]
        text = raw["text"]
        checker = raw["checker"]
        split = raw["split"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed instruction record: {raw!r}") from exc
    if split not in SPLITS:
        raise ValidationError(f"instruction '{instr_id}': split must be 'train' or 'eval'")
    if "\n" in text:
        raise ValidationError(f"instruction '{instr_id}': text must be a single line")
    return Instruction(
        id=instr_id,
        text=text,
        relevant_apis=tuple(raw.get("relevant_apis", [])),
        checker=_parse_checker(instr_id, checker),
        split=split,
    )


def instructions_load(path: str | Path) -> list[Instruction]:
    """Load and validate an instruction file; ids must be unique."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read instruction file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"instruction file {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(data, list):
        raise FormatError(f"instruction file {path}: top level must be a JSON list")

    instructions = [_parse_instruction(raw) for raw in data]
    seen = set()
    for instr in instructions:
        if instr.id in seen:
            raise ValidationError(f"duplicate instruction id '{instr.id}'")
        seen.add(instr.id)
    return instructions
