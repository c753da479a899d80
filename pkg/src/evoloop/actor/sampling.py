"""Trajectory sampling: K rollouts per instruction.

Produces exactly N x K trajectories per call, including failed ones
(status ``backend_error``), which are kept for diagnostics but never
selected. Hermetic backends make sampling a pure function of
(seed, instruction, sample index): each (n, k) pair derives its own rng,
so results are identical regardless of execution order.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..env.registry import ApiSpec
from ..env.session import Action, Session, session_step
from ..errors import BackendError, ValidationError
from ..store.trajectories import Trajectory, hash_trajectory
from .backends import derive_seed
from .grammar import ParseFailure, parse_action
from .prompts import render_prompt, render_tool_listing


@dataclass(frozen=True)
class SamplingConfig:
    k: int = 5
    m: int = 5
    temperature: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.m < 1:
            raise ValidationError("K and M must be positive")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")


def _rollout(instruction, sample_index: int, backend, cfg: SamplingConfig,
             registry: list[ApiSpec], tool_listing: str, iteration: int) -> Trajectory:
    session = Session.start(instruction, registry, round_cap=cfg.m)
    rng = random.Random(derive_seed(cfg.seed, instruction.id, sample_index))
    status = None
    while not session.finished:
        prompt = render_prompt(instruction, session.steps, registry,
                               tool_listing=tool_listing) if backend.needs_prompt else ""
        try:
            raw = backend.generate(prompt, instruction=instruction, history=session.steps,
                                   sample_index=sample_index, rng=rng,
                                   temperature=cfg.temperature)
        except BackendError:
            status = "backend_error"
            break
        parsed = parse_action(raw)
        if isinstance(parsed, ParseFailure):
            session_step(session, Action.invalid(raw))
        else:
            session_step(session, parsed)

    if status is None:
        last_action = session.steps[-1][0] if session.steps else None
        finished = last_action is not None and last_action.kind == "finish"
        status = "finished" if finished else "truncated"
    final_answer = None
    if status == "finished":
        final_answer = session.steps[-1][0].answer

    trajectory = Trajectory(
        traj_hash="",
        instruction_id=instruction.id,
        sample_index=sample_index,
        iteration_born=iteration,
        status=status,
        steps=tuple(session.steps),
        final_answer=final_answer,
    )
    return trajectory.with_hash(hash_trajectory(trajectory))


def sample_trajectories(instructions, backend, cfg: SamplingConfig,
                        registry: list[ApiSpec], *, iteration: int = 0) -> list[Trajectory]:
    """Sample K trajectories for each of N instructions, in (n, k) order."""
    if not instructions:
        raise ValidationError("cannot sample from an empty instruction set")
    if not registry:
        raise ValidationError("cannot sample against an empty registry")

    tool_listing = render_tool_listing(registry)
    tasks = [(instr, k) for instr in instructions for k in range(cfg.k)]

    def run(task):
        instr, k = task
        return _rollout(instr, k, backend, cfg, registry, tool_listing, iteration)

    workers = getattr(backend, "max_in_flight", 1)
    if backend.parallel_safe and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, tasks))
    return [run(task) for task in tasks]
