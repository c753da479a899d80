"""Trajectory scoring (oracle + remote LLM) and critic evaluation metrics."""

from .metrics import ConfusionCounts, CriticEvaluation, evaluate_critic, load_labeled_file
from .scoring import (
    CriticVerdict,
    OracleCritic,
    RemoteCritic,
    binarize_score,
    render_critic_prompt,
    score_trajectories,
)

__all__ = [
    "ConfusionCounts",
    "CriticEvaluation",
    "CriticVerdict",
    "OracleCritic",
    "RemoteCritic",
    "binarize_score",
    "evaluate_critic",
    "load_labeled_file",
    "render_critic_prompt",
    "score_trajectories",
]
