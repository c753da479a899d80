"""Run configuration: one JSON file mirroring every module's config.

Parsing is strict — unknown keys are rejected with the offending key named,
so a typo can never silently fall back to a default. Secrets (bearer
tokens) are named by environment variable only; config files hold no
credentials and are safe to snapshot into run manifests.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

ACTOR_KINDS = ("tabular", "scripted", "remote")
CRITIC_KINDS = ("oracle", "remote")


def _from_dict(cls, raw: dict, section: str):
    if not isinstance(raw, dict):
        raise ConfigError(f"config section '{section}' must be an object")
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key '{section}.{key}'")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config section '{section}': {exc}") from exc


@dataclass(frozen=True)
class EnvSection:
    registry_path: str = "builtin:apis.json"
    instructions_path: str = "builtin:instructions.json"


@dataclass(frozen=True)
class SamplingSection:
    k: int = 5
    m: int = 5
    temperature: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.m < 1:
            raise ConfigError("sampling.k and sampling.m must be positive")
        if self.temperature < 0:
            raise ConfigError("sampling.temperature must be >= 0")


@dataclass(frozen=True)
class ActorSection:
    kind: str = "tabular"
    base_url: str = ""
    model: str = ""
    temperature: float = 0.7
    timeout_s: float = 30.0
    auth_env: str = ""
    max_in_flight: int = 4
    script_path: str = ""

    def __post_init__(self):
        if self.kind not in ACTOR_KINDS:
            raise ConfigError(f"actor.kind must be one of {', '.join(ACTOR_KINDS)}")
        if self.kind == "remote" and not self.base_url:
            raise ConfigError("actor.base_url is required for the remote backend")
        if self.kind == "scripted" and not self.script_path:
            raise ConfigError("actor.script_path is required for the scripted backend")


@dataclass(frozen=True)
class CriticSection:
    backend: str = "oracle"
    threshold: int = 7
    base_url: str = ""
    model: str = ""
    temperature: float = 0.0
    timeout_s: float = 30.0
    auth_env: str = ""
    max_in_flight: int = 4

    def __post_init__(self):
        if self.backend not in CRITIC_KINDS:
            raise ConfigError(f"critic.backend must be one of {', '.join(CRITIC_KINDS)}")
        if self.backend == "remote" and not self.base_url:
            raise ConfigError("critic.base_url is required for the remote backend")


@dataclass(frozen=True)
class SelectionSection:
    p_percent: float = 10.0
    min_score_floor: int = 1

    def __post_init__(self):
        if not 0 < self.p_percent <= 100:
            raise ConfigError("selection.p_percent must be in (0, 100]")


@dataclass(frozen=True)
class DatasetSection:
    general_chat_path: str = "builtin:general_chat.jsonl"


@dataclass(frozen=True)
class TrainerSection:
    lr_initial: float = 5e-5
    lr_final: float = 5e-6
    epochs: int = 50

    def __post_init__(self):
        if not self.lr_initial > self.lr_final > 0:
            raise ConfigError("trainer learning rates must satisfy lr_initial > lr_final > 0")
        if self.epochs < 1:
            raise ConfigError("trainer.epochs must be positive")


@dataclass(frozen=True)
class LoopSection:
    iterations: int = 4

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("loop.iterations must be >= 1")


_SECTIONS = {
    "env": EnvSection,
    "sampling": SamplingSection,
    "actor": ActorSection,
    "critic": CriticSection,
    "selection": SelectionSection,
    "dataset": DatasetSection,
    "trainer": TrainerSection,
    "loop": LoopSection,
}


@dataclass(frozen=True)
class RunConfig:
    env: EnvSection = field(default_factory=EnvSection)
    sampling: SamplingSection = field(default_factory=SamplingSection)
    actor: ActorSection = field(default_factory=ActorSection)
    critic: CriticSection = field(default_factory=CriticSection)
    selection: SelectionSection = field(default_factory=SelectionSection)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    trainer: TrainerSection = field(default_factory=TrainerSection)
    loop: LoopSection = field(default_factory=LoopSection)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def hermetic(self) -> bool:
        return self.actor.kind != "remote" and self.critic.backend != "remote"


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    for key in raw:
        if key not in _SECTIONS:
            raise ConfigError(f"unknown config key '{key}'")
    sections = {name: _from_dict(cls, raw.get(name, {}), name)
                for name, cls in _SECTIONS.items()}
    return RunConfig(**sections)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON "
                          f"(line {exc.lineno}): {exc.msg}") from exc
    return config_from_dict(raw)
