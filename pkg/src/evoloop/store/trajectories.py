"""Canonical trajectory records: content hashing and JSONL persistence.

Identity: ``traj_hash`` is the first 8 bytes of SHA-256 over the canonical
JSON of (instruction_id, steps), rendered as a 16-char lowercase hex string.
It deliberately excludes sample_index, status and iteration metadata, so a
byte-identical interaction regenerated later maps to the same hash. Hex
strings (not JSON integers) keep 64-bit values safe across JSON tooling.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

from ..env.session import Action, Observation
from ..errors import FormatError

STATUSES = ("finished", "truncated", "backend_error")


@dataclass(frozen=True)
class Trajectory:
    traj_hash: str
    instruction_id: str
    sample_index: int
    iteration_born: int
    status: str
    steps: tuple[tuple[Action, Observation], ...]
    final_answer: str | None = None

    def with_hash(self, value: str) -> "Trajectory":
        return replace(self, traj_hash=value)


def _action_to_dict(action: Action) -> dict:
    out = {"kind": action.kind}
    if action.kind == "api_call":
        out["api_name"] = action.api_name
        out["args"] = action.args
    elif action.kind == "finish":
        out["answer"] = action.answer
    else:
        out["raw"] = action.raw
    return out


def _action_from_dict(raw: dict) -> Action:
    kind = raw["kind"]
    if kind == "api_call":
        return Action.api_call(raw["api_name"], raw["args"])
    if kind == "finish":
        return Action.finish(raw["answer"])
    if kind == "invalid":
        return Action.invalid(raw["raw"])
    raise FormatError(f"unknown action kind '{kind}' in trajectory record")


def _steps_to_list(steps) -> list:
    return [
        {"action": _action_to_dict(a), "observation": {"status": o.status, "payload": o.payload}}
        for a, o in steps
    ]


def hash_trajectory(trajectory: Trajectory) -> str:
    """Deterministic 64-bit content hash over (instruction_id, steps)."""
    canonical = json.dumps(
        {"instruction_id": trajectory.instruction_id, "steps": _steps_to_list(trajectory.steps)},
        sort_keys=True, separators=(",", ":"), ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).digest()[:8].hex()


def trajectory_to_dict(trajectory: Trajectory) -> dict:
    out = {
        "traj_hash": trajectory.traj_hash,
        "instruction_id": trajectory.instruction_id,
        "sample_index": trajectory.sample_index,
        "iteration_born": trajectory.iteration_born,
        "status": trajectory.status,
        "steps": _steps_to_list(trajectory.steps),
    }
    if trajectory.final_answer is not None:
        out["final_answer"] = trajectory.final_answer
    return out


def trajectory_from_dict(raw: dict) -> Trajectory:
    try:
        steps = tuple(
            (_action_from_dict(s["action"]),
             Observation(s["observation"]["status"], s["observation"]["payload"]))
            for s in raw["steps"]
        )
        return Trajectory(
            traj_hash=raw["traj_hash"],
            instruction_id=raw["instruction_id"],
            sample_index=raw["sample_index"],
            iteration_born=raw["iteration_born"],
            status=raw["status"],
            steps=steps,
            final_answer=raw.get("final_answer"),
        )
    except KeyError as exc:
        raise FormatError(f"trajectory record is missing field {exc}") from exc


def persist_trajectories(trajectories, path: str | Path) -> Path:
    """Write one trajectory per line; field order is stable across runs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for trajectory in trajectories:
            fh.write(json.dumps(trajectory_to_dict(trajectory), ensure_ascii=False) + "\n")
    return path


def load_trajectories(path: str | Path) -> list[Trajectory]:
    path = Path(path)
    out = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(trajectory_from_dict(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
    return out
