"""Deterministic simulated multi-API environment.

Registry of mock APIs, per-session state machine, observation rendering and
ground-truth answer checking. Everything here is hermetic: handlers are pure
functions of (args, world_state) and the checkers are total.
"""

from .checking import check_answer, normalize_answer
from .instructions import Checker, Instruction, instructions_load
from .registry import ApiSpec, ParamSpec, registry_load
from .session import Action, Observation, Session, session_step

__all__ = [
    "Action",
    "ApiSpec",
    "Checker",
    "Instruction",
    "Observation",
    "ParamSpec",
    "Session",
    "check_answer",
    "instructions_load",
    "normalize_answer",
    "registry_load",
    "session_step",
]
