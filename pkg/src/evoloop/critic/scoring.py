"""Trajectory scoring.

Two backends behind one interface:

* ``OracleCritic`` — deterministic: 10 when the environment's checker accepts
  the final answer, 2 for a finished-but-wrong trajectory, 0 for truncated
  ones. Exists so the whole loop is testable hermetically.
* ``RemoteCritic`` — LLM-as-judge over a rendered rubric prompt; the reply
  must contain a line ``SCORE: <integer 0-10>``. Unparseable replies and
  transport failures score 0 with ``parse_ok = False`` (fail-safe toward
  exclusion, never retried past the transport's bounded attempts).

Scores are integers in [0, 10]; a score >= ``binarize_score`` threshold
(default 7) counts as a predicted success when comparing against human labels.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..env.checking import check_answer
from ..env.instructions import Instruction
from ..errors import BackendError, ValidationError
from ..store.trajectories import Trajectory
from .prompts import render_critic_prompt

SCORE_MIN = 0
SCORE_MAX = 10
SUCCESS_THRESHOLD = 7

_SCORE_RE = re.compile(r"SCORE:\s*(-?\d+)")


@dataclass(frozen=True)
class CriticVerdict:
    traj_hash: str
    score: int
    rationale: str
    backend: str
    parse_ok: bool = True

    def __post_init__(self):
        if not SCORE_MIN <= self.score <= SCORE_MAX:
            raise ValidationError(f"critic score {self.score} outside [0, 10]")


def binarize_score(score: int, threshold: int = SUCCESS_THRESHOLD) -> str:
    return "success" if score >= threshold else "fail"


class OracleCritic:
    backend = "oracle"

    def score(self, trajectory: Trajectory, instruction: Instruction) -> CriticVerdict:
        if trajectory.status == "backend_error":
            raise ValidationError("cannot score a backend_error trajectory")
        if trajectory.status == "truncated":
            return CriticVerdict(trajectory.traj_hash, 0,
                                 "truncated: never produced a final answer", self.backend)
        if check_answer(instruction, trajectory.final_answer or ""):
            return CriticVerdict(trajectory.traj_hash, 10,
                                 "final answer matches the ground truth", self.backend)
        return CriticVerdict(trajectory.traj_hash, 2,
                             "finished, but the final answer is wrong", self.backend)


def parse_score_reply(reply: str) -> tuple[int, bool]:
    """First SCORE: line with an in-range integer wins; none -> (0, False)."""
    for match in _SCORE_RE.finditer(reply):
        value = int(match.group(1))
        if SCORE_MIN <= value <= SCORE_MAX:
            return value, True
    return 0, False


class RemoteCritic:
    backend = "remote"

    def __init__(self, client, temperature: float = 0.0):
        self.client = client
        self.temperature = temperature

    def score(self, trajectory: Trajectory, instruction: Instruction) -> CriticVerdict:
        if trajectory.status == "backend_error":
            raise ValidationError("cannot score a backend_error trajectory")
        prompt = render_critic_prompt(instruction, trajectory)
        try:
            reply = self.client.complete([{"role": "user", "content": prompt}],
                                         temperature=self.temperature)
        except BackendError as exc:
            return CriticVerdict(trajectory.traj_hash, 0, f"critic backend failed: {exc}",
                                 self.backend, parse_ok=False)
        score, parse_ok = parse_score_reply(reply)
        rationale = reply.strip() if parse_ok else f"unparseable critic reply: {reply.strip()[:200]}"
        return CriticVerdict(trajectory.traj_hash, score, rationale, self.backend,
                             parse_ok=parse_ok)


def score_trajectories(trajectories, instructions_by_id: dict, critic,
                       max_in_flight: int = 1) -> list[CriticVerdict]:
    """Score many trajectories; verdicts come back in input order."""

    def one(trajectory):
        return critic.score(trajectory, instructions_by_id[trajectory.instruction_id])

    if max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            return list(pool.map(one, trajectories))
    return [one(t) for t in trajectories]
