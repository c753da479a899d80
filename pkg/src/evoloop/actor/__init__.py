"""Actor abstraction: prompt construction, action grammar and sampling."""

from .backends import RemoteBackend, ScriptedBackend, TabularPolicyBackend
from .grammar import ParseFailure, parse_action, serialize_action
from .prompts import render_prompt
from .sampling import SamplingConfig, sample_trajectories

__all__ = [
    "ParseFailure",
    "RemoteBackend",
    "SamplingConfig",
    "ScriptedBackend",
    "TabularPolicyBackend",
    "parse_action",
    "render_prompt",
    "sample_trajectories",
    "serialize_action",
]
