"""Actor prompt construction.

The prompt is a deterministic function of (instruction, history, registry):
tool listing with parameter specs, the action grammar, the task, and the
full interleaved action/observation history.
"""

from __future__ import annotations

from ..env.registry import ApiSpec
from ..env.session import Action, Observation
from .grammar import serialize_action

_GRAMMAR_BLOCK = """\
Respond with exactly one action per turn, using one of these forms:
  CALL <api> <json-object-args>   invoke an api, e.g. CALL some_api {"x": 1}
  FINISH <final answer>           end the task with your answer
"""


def _render_param(param) -> str:
    req = "required" if param.required else "optional"
    desc = f" - {param.description}" if param.description else ""
    return f"    {param.name} ({param.type}, {req}){desc}"


def render_tool_listing(registry: list[ApiSpec]) -> str:
    lines = ["Available apis:"]
    for spec in registry:
        lines.append(f"  {spec.name}: {spec.description}")
        for param in spec.params:
            lines.append(_render_param(param))
        if not spec.params:
            lines.append("    (no parameters)")
    return "\n".join(lines)


def render_prompt(instruction, history: list[tuple[Action, Observation]],
                  registry: list[ApiSpec], *, tool_listing: str | None = None) -> str:
    """Build the full actor prompt for the next turn.

    ``tool_listing`` lets callers reuse a precomputed registry block when
    rendering many prompts against the same registry.
    """
    listing = tool_listing if tool_listing is not None else render_tool_listing(registry)
    parts = [
        "You are an assistant that completes tasks by calling apis.",
        "",
        listing,
        "",
        _GRAMMAR_BLOCK,
        f"TASK: {instruction.text}",
    ]
    if history:
        parts.append("")
        parts.append("History so far:")
        for action, observation in history:
            parts.append(serialize_action(action))
            parts.append(f"OBSERVATION[{observation.status}]: {observation.payload}")
    parts.append("")
    parts.append("Your next action:")
    return "\n".join(parts)
