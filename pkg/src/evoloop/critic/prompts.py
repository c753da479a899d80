"""Critic prompt: rubric-based whole-trajectory review.

The rubric asks the judge to examine the four places an agent trajectory
goes wrong: api selection, call arguments, handling of error observations,
and the final conclusion. Output contract: a line ``SCORE: <integer 0-10>``
followed by the rationale.
"""

from __future__ import annotations

from ..actor.grammar import serialize_action
from ..env.instructions import Instruction
from ..store.trajectories import Trajectory

_RUBRIC = """\
Rate how well the agent fulfilled the task, on an integer scale from 0 (useless)
to 10 (flawless). Weigh each of these aspects:
  1. api selection: did the agent pick apis relevant to the task?
  2. call arguments: were the arguments well-formed and correct?
  3. exception handling: did the agent recover sensibly from error observations?
  4. conclusion: is the final answer correct and justified by the observations?

Reply with a line `SCORE: <integer 0-10>` followed by a short rationale."""


def render_critic_prompt(instruction: Instruction, trajectory: Trajectory) -> str:
    parts = [
        "You are reviewing the full interaction trace of a tool-calling agent.",
        "",
        f"TASK: {instruction.text}",
        "",
        "Trajectory:",
    ]
    for index, (action, observation) in enumerate(trajectory.steps, start=1):
        parts.append(f"STEP {index}:")
        parts.append(f"  agent: {serialize_action(action)}")
        parts.append(f"  OBSERVATION[{observation.status}]: {observation.payload}")
    if not trajectory.steps:
        parts.append("  (no steps were taken)")
    parts.append("")
    parts.append(_RUBRIC)
    return "\n".join(parts)
