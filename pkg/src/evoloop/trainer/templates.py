"""Action templates: the tabular policy's renderable vocabulary.

A template turns (instruction text, interaction history) into concrete
action text through the shared grammar. Call templates carry a per-api
argument extractor over the instruction text; extraction that finds nothing
still renders a call (with empty args), which the environment answers with
an api_error — a learnable outcome, not a crash. The finish template
answers with the payload of the last successful observation.

Instruction classification is intentionally coarse (a handful of task
families keyed on surface patterns) so that what is learned from K samples
of one instruction generalizes to unseen instances of the same family.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..env.session import Action
from ..actor.grammar import serialize_action
from ..errors import ValidationError

CLASS_ARITH = "arith"
CLASS_WEATHER = "weather"
CLASS_CONVERT = "convert"
CLASS_DEFINE = "define"
CLASS_TODO = "todo"
CLASS_OTHER = "other"

_CONVERT_RE = re.compile(r"\bconvert\b", re.IGNORECASE)
_TODO_RE = re.compile(r"\btodo\b", re.IGNORECASE)
_WEATHER_RE = re.compile(r"\bweather\b", re.IGNORECASE)
_DEFINE_RE = re.compile(r"'[^']+'.*\bmean\b", re.IGNORECASE)
_ARITH_RUN_RE = re.compile(r"[0-9+\-*/(). ]+")
_CITY_RE = re.compile(r"\bin ([A-Z][A-Za-z]+)")
_QUOTED_RE = re.compile(r"'([^']+)'")
_ADD_ITEM_RE = re.compile(r"\badd '([^']+)' to", re.IGNORECASE)
_CONVERT_ARGS_RE = re.compile(r"\bconvert (-?\d+(?:\.\d+)?) ([A-Za-z]+) to ([A-Za-z]+)",
                              re.IGNORECASE)


def classify_instruction(text: str) -> str:
    if _CONVERT_RE.search(text):
        return CLASS_CONVERT
    if _TODO_RE.search(text):
        return CLASS_TODO
    if _WEATHER_RE.search(text):
        return CLASS_WEATHER
    if _DEFINE_RE.search(text):
        return CLASS_DEFINE
    if _extract_expression(text):
        return CLASS_ARITH
    return CLASS_OTHER


def _extract_expression(text: str) -> str:
    """Longest run of arithmetic characters that contains a digit."""
    best = ""
    for match in _ARITH_RUN_RE.finditer(text):
        run = match.group(0).strip().rstrip(".").strip()
        if any(ch.isdigit() for ch in run) and len(run) > len(best):
            best = run
    return best


def _args_calculator(text: str) -> dict:
    return {"expr": _extract_expression(text)}


def _args_weather(text: str) -> dict:
    match = _CITY_RE.search(text)
    return {"city": match.group(1) if match else ""}


def _args_convert(text: str) -> dict:
    match = _CONVERT_ARGS_RE.search(text)
    if not match:
        return {"value": 0.0, "from_unit": "", "to_unit": ""}
    return {"value": float(match.group(1)), "from_unit": match.group(2),
            "to_unit": match.group(3)}


def _args_dictionary(text: str) -> dict:
    match = _QUOTED_RE.search(text)
    return {"word": match.group(1) if match else ""}


def _args_todo_add(text: str) -> dict:
    match = _ADD_ITEM_RE.search(text)
    return {"item": match.group(1) if match else ""}


_EXTRACTORS = {
    "calculator": _args_calculator,
    "weather_lookup": _args_weather,
    "unit_convert": _args_convert,
    "dictionary": _args_dictionary,
    "todo_add": _args_todo_add,
}

FALLBACK_ANSWER = "unknown"


@dataclass(frozen=True)
class ActionTemplate:
    id: str
    kind: str  # "api_call" | "finish_last_ok"
    api_name: str | None = None

    def to_dict(self) -> dict:
        out = {"id": self.id, "kind": self.kind}
        if self.api_name is not None:
            out["api_name"] = self.api_name
        return out


DEFAULT_TEMPLATES: tuple[ActionTemplate, ...] = tuple(
    [ActionTemplate(id=f"call_{api}", kind="api_call", api_name=api)
     for api in ("calculator", "weather_lookup", "unit_convert", "dictionary", "todo_add")]
    + [ActionTemplate(id="finish_last_ok", kind="finish_last_ok")]
)

_TEMPLATES_BY_ID = {t.id: t for t in DEFAULT_TEMPLATES}


def template_from_dict(raw: dict) -> ActionTemplate:
    template = _TEMPLATES_BY_ID.get(raw.get("id"))
    if template is None:
        raise ValidationError(f"unknown action template id {raw.get('id')!r}")
    return template


def render_template(template: ActionTemplate, instruction_text: str,
                    last_ok_payload: str | None) -> str:
    if template.kind == "api_call":
        args = _EXTRACTORS[template.api_name](instruction_text)
        return serialize_action(Action.api_call(template.api_name, args))
    answer = last_ok_payload if last_ok_payload is not None else FALLBACK_ANSWER
    return serialize_action(Action.finish(answer))


def match_template(templates, instruction_text: str, last_ok_payload: str | None,
                   action_text: str) -> int | None:
    """Index of the template that renders exactly this action text, else None."""
    for index, template in enumerate(templates):
        if render_template(template, instruction_text, last_ok_payload) == action_text:
            return index
    return None
