"""Action grammar: text <-> structured actions.

Grammar:
    CALL <api_name> <json-object-args>     (one line)
    FINISH <free text to end of message>

The parser scans for the first CALL/FINISH keyword token, ignoring any
surrounding prose (including prose on the same line before the keyword).
For every structured action ``a``, ``parse_action(serialize_action(a)) == a``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..env.session import Action

_KEYWORD_RE = re.compile(r"\b(CALL|FINISH)\b")
_NAME_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)")

FAILURE_NO_ACTION = "no action"
FAILURE_BAD_ARGS = "bad args"


@dataclass(frozen=True)
class ParseFailure:
    reason: str
    detail: str = ""


def serialize_action(action: Action) -> str:
    """Render an action in the grammar; invalid actions echo their raw text."""
    if action.kind == "api_call":
        args = json.dumps(action.args, sort_keys=True, separators=(", ", ": "),
                          ensure_ascii=False)
        return f"CALL {action.api_name} {args}"
    if action.kind == "finish":
        return f"FINISH {action.answer}" if action.answer else "FINISH"
    return action.raw


def parse_action(raw: str) -> Action | ParseFailure:
    match = _KEYWORD_RE.search(raw)
    if match is None:
        return ParseFailure(FAILURE_NO_ACTION, "no CALL or FINISH keyword found")

    rest = raw[match.end():]
    if match.group(1) == "FINISH":
        return Action.finish(rest.strip())

    line = rest.split("\n", 1)[0]
    name_match = _NAME_RE.match(line)
    if name_match is None:
        return ParseFailure(FAILURE_BAD_ARGS, "missing api name after CALL")
    args_text = line[name_match.end():].strip()
    if not args_text:
        return ParseFailure(FAILURE_BAD_ARGS, "missing JSON args object after api name")
    try:
        args = json.loads(args_text)
    except json.JSONDecodeError as exc:
        return ParseFailure(FAILURE_BAD_ARGS, f"args are not valid JSON: {exc.msg}")
    if not isinstance(args, dict):
        return ParseFailure(FAILURE_BAD_ARGS, "args must be a JSON object")
    return Action.api_call(name_match.group(1), args)
