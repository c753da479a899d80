"""Builds masked training examples from trajectories and chat records.

The training sequence for a trajectory is the task line, then alternating
action / observation lines, ending with the final action (the terminal
observation is a post-terminal echo and is not part of the sequence). The
mask spans cover exactly the serialized action characters: concatenating the
masked substrings reproduces the serialized actions, and no masked character
ever falls inside the task line or an observation. Chat examples mask
exactly the assistant reply.

Only finished trajectories are trainable: complete action sequences are the
supervision target, and truncated runs score 0 anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..actor.grammar import serialize_action
from ..env.instructions import Instruction
from ..errors import ValidationError
from ..store.trajectories import Trajectory

TASK_PREFIX = "TASK: "
OBS_PREFIX = "OBSERVATION["


@dataclass(frozen=True)
class SftExample:
    source: str  # "trajectory" | "general_chat"
    text: str
    mask_spans: tuple[tuple[int, int], ...]
    origin_hash: str


def _accumulate(parts: list, spans: list, length: int, piece: str, masked: bool) -> int:
    parts.append(piece)
    if masked:
        spans.append((length, length + len(piece)))
    return length + len(piece)


def build_sft_example(trajectory: Trajectory, instruction: Instruction) -> SftExample:
    if trajectory.status != "finished":
        raise ValidationError(
            f"only finished trajectories are trainable, got status "
            f"'{trajectory.status}' for {trajectory.traj_hash}")
    if instruction.id != trajectory.instruction_id:
        raise ValidationError("instruction does not match the trajectory")

    parts: list = []
    spans: list = []
    length = 0
    length = _accumulate(parts, spans, length, f"{TASK_PREFIX}{instruction.text}\n", False)
    last = len(trajectory.steps) - 1
    for index, (action, observation) in enumerate(trajectory.steps):
        length = _accumulate(parts, spans, length, serialize_action(action), True)
        if index != last:
            length = _accumulate(parts, spans, length,
                                 f"\n{OBS_PREFIX}{observation.status}]: {observation.payload}\n",
                                 False)
    return SftExample(source="trajectory", text="".join(parts),
                      mask_spans=tuple(spans), origin_hash=trajectory.traj_hash)


def build_chat_example(record: dict) -> SftExample:
    """Chat record {id, prompt, reply} -> example masking exactly the reply."""
    prefix = f"USER: {record['prompt']}\nASSISTANT: "
    reply = record["reply"]
    return SftExample(
        source="general_chat",
        text=prefix + reply,
        mask_spans=((len(prefix), len(prefix) + len(reply)),),
        origin_hash=str(record["id"]),
    )


def validate_example(example: SftExample):
    """Re-check the span invariants at a trust boundary; raises on violation."""
    previous_end = 0
    for start, end in example.mask_spans:
        if not (0 <= start < end <= len(example.text)):
            raise ValidationError(
                f"span ({start}, {end}) out of bounds for text of length {len(example.text)}")
        if start < previous_end:
            raise ValidationError(f"span ({start}, {end}) overlaps or is out of order")
        previous_end = end
