"""Trajectory data model, content-hash identity, persistence, exclusion ledger."""

from .ledger import ExclusionLedger
from .trajectories import (
    Trajectory,
    hash_trajectory,
    load_trajectories,
    persist_trajectories,
)

__all__ = [
    "ExclusionLedger",
    "Trajectory",
    "hash_trajectory",
    "load_trajectories",
    "persist_trajectories",
]
