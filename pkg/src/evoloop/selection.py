"""Training-data selection: global top-p% by critic score.

Eligibility: not previously used (exclusion ledger) and score at or above
the floor (default 1, which drops score-0 failures even when p% would reach
them). The quota is ceil(p/100 * eligible) — ceiling, so small desk-scale
pools still make progress. Ties break by (score desc, traj_hash asc), making
selection a total, deterministic order. Selected hashes are recorded in the
ledger in the same call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .critic.scoring import CriticVerdict
from .errors import ValidationError
from .store.ledger import ExclusionLedger
from .store.trajectories import Trajectory


@dataclass(frozen=True)
class SelectionConfig:
    p_percent: float = 10.0
    min_score_floor: int = 1

    def __post_init__(self):
        if not 0 < self.p_percent <= 100:
            raise ValidationError("p_percent must be in (0, 100]")


def select(verdicts: list[tuple[Trajectory, CriticVerdict]], ledger: ExclusionLedger,
           cfg: SelectionConfig, *, iteration: int = 0) -> list[Trajectory]:
    """Pick the top-p% eligible trajectories and mark them used."""
    # byte-identical resamples share a hash; keep one candidate per hash
    # (highest score), or a single call could select duplicates
    best: dict[str, tuple[Trajectory, CriticVerdict]] = {}
    order: list[str] = []
    for trajectory, verdict in verdicts:
        if trajectory.traj_hash in ledger or verdict.score < cfg.min_score_floor:
            continue
        held = best.get(trajectory.traj_hash)
        if held is None:
            best[trajectory.traj_hash] = (trajectory, verdict)
            order.append(trajectory.traj_hash)
        elif verdict.score > held[1].score:
            best[trajectory.traj_hash] = (trajectory, verdict)

    candidates = [best[h] for h in order]
    if not candidates:
        return []

    quota = min(math.ceil(cfg.p_percent / 100 * len(candidates)), len(candidates))
    ranked = sorted(candidates, key=lambda tv: (-tv[1].score, tv[0].traj_hash))
    selected = [trajectory for trajectory, _ in ranked[:quota]]
    ledger.record([t.traj_hash for t in selected], iteration)
    return selected
