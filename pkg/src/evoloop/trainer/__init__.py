"""Desk-scale trainable actor: tabular-softmax policy over action templates."""

from .policy import PolicyModel, context_key, load_checkpoint, policy_act, save_checkpoint
from .schedule import cosine_lr
from .templates import DEFAULT_TEMPLATES, classify_instruction, render_template
from .training import TrainConfig, TrainReport, grad_check, nll, train

__all__ = [
    "DEFAULT_TEMPLATES",
    "PolicyModel",
    "TrainConfig",
    "TrainReport",
    "classify_instruction",
    "context_key",
    "cosine_lr",
    "grad_check",
    "load_checkpoint",
    "nll",
    "policy_act",
    "render_template",
    "save_checkpoint",
    "train",
]
