"""Cosine learning-rate schedule (no warm-up), shared formula with the
upstream trainer:

    lr(t) = lr_final + 1/2 (lr_initial - lr_final) (1 + cos(pi t / T_total))

For a run of S optimizer steps the adapter evaluates t = 0 .. S-1 against
T_total = S-1, so the first step uses exactly lr_initial and the last step
exactly lr_final. Cross-implementation equality with the upstream trainer
is pinned by a frozen 10-point fixture in the tests.
"""

from __future__ import annotations

import math

LR_INITIAL_DEFAULT = 5e-5
LR_FINAL_DEFAULT = 5e-6


def cosine_lr(t: float, total: float, lr_initial: float = LR_INITIAL_DEFAULT,
              lr_final: float = LR_FINAL_DEFAULT) -> float:
    if total <= 0:
        raise ValueError("total steps must be positive")
    if not 0 <= t <= total:
        raise ValueError(f"step {t} outside [0, {total}]")
    if t == 0:
        return lr_initial
    if t == total:
        return lr_final
    return lr_final + 0.5 * (lr_initial - lr_final) * (1 + math.cos(math.pi * t / total))


def step_lr(step: int, n_steps: int, lr_initial: float = LR_INITIAL_DEFAULT,
            lr_final: float = LR_FINAL_DEFAULT) -> float:
    """LR for optimizer step ``step`` of ``n_steps`` (endpoints hit exactly)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps == 1:
        return lr_initial
    return cosine_lr(step, n_steps - 1, lr_initial, lr_final)
