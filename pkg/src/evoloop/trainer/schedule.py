"""Cosine learning-rate schedule, no warm-up.

lr(t) = lr_final + 1/2 (lr_initial - lr_final) (1 + cos(pi t / T_total))

Endpoints are pinned exactly (lr(0) = lr_initial, lr(T_total) = lr_final)
rather than trusting float cancellation; the curve is monotone
non-increasing on [0, T_total].
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
