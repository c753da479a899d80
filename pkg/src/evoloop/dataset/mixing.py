"""1:1 mixing of trajectory examples with general-domain chat data."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..errors import CapacityError, ValidationError
from .builder import SftExample, build_chat_example


@dataclass(frozen=True)
class MixedDataset:
    examples: tuple[SftExample, ...]
    iteration: int
    n_trajectory: int
    n_general: int

    def __post_init__(self):
        if abs(self.n_trajectory - self.n_general) > 1:
            raise ValidationError(
                f"mix ratio violated: {self.n_trajectory} trajectory vs "
                f"{self.n_general} general examples")


def mix(traj_examples: list[SftExample], general_pool: list[dict], seed: int,
        *, iteration: int = 0) -> MixedDataset:
    """Draw |traj_examples| chat records (seeded, without replacement) and shuffle.

    An empty trajectory list yields an empty dataset: an iteration with
    nothing selected skips training rather than training on chat data alone.
    """
    if not traj_examples:
        return MixedDataset(examples=(), iteration=iteration, n_trajectory=0, n_general=0)
    if len(general_pool) < len(traj_examples):
        raise CapacityError(
            f"general pool has {len(general_pool)} records but {len(traj_examples)} "
            f"are needed for 1:1 mixing")

    seen = set()
    for example in traj_examples:
        if example.origin_hash in seen:
            raise ValidationError(f"duplicate origin_hash {example.origin_hash} in dataset")
        seen.add(example.origin_hash)

    rng = random.Random(seed)
    drawn = rng.sample(general_pool, len(traj_examples))
    combined = list(traj_examples) + [build_chat_example(r) for r in drawn]
    rng.shuffle(combined)
    return MixedDataset(examples=tuple(combined), iteration=iteration,
                        n_trajectory=len(traj_examples), n_general=len(drawn))
