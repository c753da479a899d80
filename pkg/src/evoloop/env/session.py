"""Session state machine: dispatches actions, renders observations.

A session owns per-session mutable world state (for stateful apis like the
todo list), so concurrent sessions never interact. Unknown apis, bad
arguments and unparseable actor output all become error observations that
consume a round; only stepping an already-finished session is a hard error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import StateError
from .handlers import HANDLERS, HandlerError
from .instructions import Instruction
from .registry import ApiSpec, registry_by_name

KIND_API_CALL = "api_call"
KIND_FINISH = "finish"
KIND_INVALID = "invalid"

STATUS_OK = "ok"
STATUS_API_ERROR = "api_error"
STATUS_PARSE_ERROR = "parse_error"


@dataclass(frozen=True)
class Action:
    """One actor move: an api call, a final answer, or unparseable output."""

    kind: str
    api_name: str | None = None
    args: dict | None = None
    answer: str | None = None
    raw: str | None = None

    @staticmethod
    def api_call(api_name: str, args: dict) -> "Action":
        return Action(kind=KIND_API_CALL, api_name=api_name, args=dict(args))

    @staticmethod
    def finish(answer: str) -> "Action":
        # answers are whitespace-canonical so the grammar round-trips
        return Action(kind=KIND_FINISH, answer=answer.strip())

    @staticmethod
    def invalid(raw: str) -> "Action":
        return Action(kind=KIND_INVALID, raw=raw)

    def __post_init__(self):
        if self.kind == KIND_API_CALL:
            ok = self.api_name is not None and self.args is not None \
                and self.answer is None and self.raw is None
        elif self.kind == KIND_FINISH:
            ok = self.answer is not None and self.api_name is None \
                and self.args is None and self.raw is None
        elif self.kind == KIND_INVALID:
            ok = self.raw is not None and self.api_name is None \
                and self.args is None and self.answer is None
        else:
            ok = False
        if not ok:
            raise ValueError(f"inconsistent action fields for kind '{self.kind}'")


@dataclass(frozen=True)
class Observation:
    status: str
    payload: str

    def __post_init__(self):
        if not self.payload:
            raise ValueError("observation payload must be non-empty")


def _single_line(text: str) -> str:
    return " ".join(text.splitlines()) if "\n" in text else text


@dataclass
class Session:
    instruction: Instruction
    round_cap: int
    registry: dict[str, ApiSpec]
    steps: list[tuple[Action, Observation]] = field(default_factory=list)
    world_state: dict = field(default_factory=dict)
    finished: bool = False

    @staticmethod
    def start(instruction: Instruction, registry: list[ApiSpec], round_cap: int) -> "Session":
        if round_cap < 1:
            raise ValueError("round_cap must be positive")
        return Session(instruction=instruction, round_cap=round_cap,
                       registry=registry_by_name(registry))


def _type_ok(value, type_tag: str) -> bool:
    if type_tag == "string":
        return isinstance(value, str)
    if type_tag == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_tag == "boolean":
        return isinstance(value, bool)
    return False


def _validate_args(spec: ApiSpec, args: dict) -> str | None:
    """Returns an error message for bad args, or None when they validate."""
    known = {p.name: p for p in spec.params}
    for name in args:
        if name not in known:
            expected = ", ".join(sorted(known)) or "(none)"
            return f"unknown argument '{name}' for api '{spec.name}' (expected: {expected})"
    for p in spec.params:
        if p.required and p.name not in args:
            return f"missing required argument '{p.name}' for api '{spec.name}'"
        if p.name in args and not _type_ok(args[p.name], p.type):
            return (f"argument '{p.name}' of api '{spec.name}' must be a {p.type}, "
                    f"got {type(args[p.name]).__name__}")
    return None


def _dispatch(session: Session, action: Action) -> Observation:
    spec = session.registry.get(action.api_name)
    if spec is None:
        available = ", ".join(sorted(session.registry)) or "(none)"
        return Observation(STATUS_API_ERROR,
                           f"unknown api '{action.api_name}' (available: {available})")
    problem = _validate_args(spec, action.args)
    if problem is not None:
        return Observation(STATUS_API_ERROR, problem)
    handler = HANDLERS[spec.handler_id]
    try:
        payload = handler(action.args, session.world_state)
    except HandlerError as exc:
        return Observation(STATUS_API_ERROR, f"{spec.name}: {exc}")
    return Observation(STATUS_OK, _single_line(payload))


def session_step(session: Session, action: Action) -> Observation:
    """Apply one action to the session and record the resulting observation.

    Finish actions and hitting the round cap mark the session finished;
    stepping a finished session raises :class:`StateError`.
    """
    if session.finished:
        raise StateError("cannot step a finished session")

    if action.kind == KIND_API_CALL:
        observation = _dispatch(session, action)
    elif action.kind == KIND_FINISH:
        echoed = _single_line(action.answer) if action.answer else "(empty)"
        observation = Observation(STATUS_OK, f"answer recorded: {echoed}")
        session.finished = True
    elif action.kind == KIND_INVALID:
        # fixed message, no echo of the raw text: the raw line already sits in
        # the history, and echoing it would let an action's bytes reappear
        # inside an observation
        observation = Observation(STATUS_PARSE_ERROR,
                                  "could not parse an action; expected a "
                                  "CALL <api> <json-args> or FINISH <answer> line")
    else:
        raise ValueError(f"unknown action kind '{action.kind}'")

    session.steps.append((action, observation))
    if len(session.steps) >= session.round_cap:
        session.finished = True
    return observation
