"""Tabular-softmax policy over action templates.

State: one weight vector per context key, where a key is
(instruction family, step index, last observation status). Unseen contexts
act uniformly. Checkpoints round-trip exactly through JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..env.instructions import Instruction
from ..errors import FormatError
from .templates import (
    ActionTemplate,
    DEFAULT_TEMPLATES,
    classify_instruction,
    render_template,
    template_from_dict,
)


@dataclass
class PolicyModel:
    version: int = 0
    templates: tuple[ActionTemplate, ...] = DEFAULT_TEMPLATES
    contexts: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_templates(self) -> int:
        return len(self.templates)

    def weights_for(self, key: str) -> np.ndarray:
        weights = self.contexts.get(key)
        if weights is None:
            return np.zeros(self.n_templates)
        return weights

    def copy(self) -> "PolicyModel":
        return PolicyModel(version=self.version, templates=self.templates,
                           contexts={k: v.copy() for k, v in self.contexts.items()})


def make_key(family: str, step_index: int, last_status: str) -> str:
    return f"{family}|step{step_index}|{last_status}"


def context_key(instruction: Instruction, history) -> str:
    """Coarse conditioning key for the prefix I A_1 O_1 ... before this step."""
    last_status = history[-1][1].status if history else "none"
    return make_key(classify_instruction(instruction.text), len(history), last_status)


def last_ok_payload(history) -> str | None:
    for _, observation in reversed(list(history)):
        if observation.status == "ok":
            return observation.payload
    return None


def softmax(weights: np.ndarray) -> np.ndarray:
    shifted = weights - weights.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def policy_act(model: PolicyModel, instruction: Instruction, history,
               temperature: float, rng) -> str:
    """Sample (or argmax, at temperature 0) an action and render it as text."""
    key = context_key(instruction, history)
    weights = model.weights_for(key)
    if temperature <= 1e-12:
        index = int(np.argmax(weights))
    else:
        probs = softmax(weights / temperature)
        draw = rng.random()
        cumulative = 0.0
        index = len(probs) - 1
        for i, p in enumerate(probs):
            cumulative += p
            if draw < cumulative:
                index = i
                break
    return render_template(model.templates[index], instruction.text,
                           last_ok_payload(history))


def save_checkpoint(model: PolicyModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": model.version,
        "action_templates": [t.to_dict() for t in model.templates],
        "contexts": {k: [float(x) for x in v] for k, v in sorted(model.contexts.items())},
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def load_checkpoint(path: str | Path) -> PolicyModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
        templates = tuple(template_from_dict(t) for t in payload["action_templates"])
        contexts = {k: np.asarray(v, dtype=float) for k, v in payload["contexts"].items()}
        version = payload["version"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"bad checkpoint file {path}: {exc}") from exc
    model = PolicyModel(version=version, templates=templates, contexts=contexts)
    for key, weights in contexts.items():
        if weights.shape != (model.n_templates,):
            raise FormatError(f"checkpoint context '{key}' has {weights.shape[0]} weights, "
                              f"expected {model.n_templates}")
    return model
