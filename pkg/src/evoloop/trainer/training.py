"""Masked-NLL training over the exported dataset format.

The trainer consumes the same JSONL contract as any downstream fine-tuning
adapter: it re-derives (context, action-template) occurrences from each
trajectory example's text and mask spans, then minimizes the summed
negative log-likelihood of the masked actions with full-batch gradient
descent under the cosine schedule.

General-chat examples pass through the dataset to honor the 1:1 mixing
contract but contribute nothing to the tabular model's loss: its vocabulary
is action templates, not free text. (A real-LM adapter consumes them fully.)
Masked actions that match no known template are skipped and counted, never
fatal: a remote actor can emit argument spellings outside the template set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..dataset.builder import OBS_PREFIX, SftExample, TASK_PREFIX
from ..dataset.mixing import MixedDataset
from ..errors import ValidationError
from . import kernels
from .policy import PolicyModel, make_key
from .schedule import LR_FINAL_DEFAULT, LR_INITIAL_DEFAULT
from .templates import classify_instruction, match_template

_TASK_LINE_RE = re.compile(rf"^{re.escape(TASK_PREFIX)}(.*)\n$")
_OBS_SEGMENT_RE = re.compile(rf"^\n{re.escape(OBS_PREFIX)}(\w+)\]: (.*)\n$")


@dataclass(frozen=True)
class TrainConfig:
    lr_initial: float = LR_INITIAL_DEFAULT
    lr_final: float = LR_FINAL_DEFAULT
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if not self.lr_initial > self.lr_final > 0:
            raise ValidationError("learning rates must satisfy lr_initial > lr_final > 0")
        if self.epochs < 1:
            raise ValidationError("epochs must be positive")


@dataclass
class TrainReport:
    loss_curve: list[float] = field(default_factory=list)
    final_loss: float = 0.0
    n_occurrences: int = 0
    skipped_unknown: int = 0
    noop: bool = False


@dataclass(frozen=True)
class _Decoded:
    instruction_text: str
    actions: tuple[str, ...]
    statuses: tuple[str, ...]  # status of the observation after each action
    payloads: tuple[str, ...]


def _decode_trajectory_text(example: SftExample) -> _Decoded | None:
    """Recover instruction, actions and observations from text + spans."""
    spans = example.mask_spans
    if not spans:
        return None
    task_match = _TASK_LINE_RE.match(example.text[: spans[0][0]])
    if task_match is None:
        return None
    statuses, payloads = [], []
    for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
        obs_match = _OBS_SEGMENT_RE.match(example.text[prev_end:next_start])
        if obs_match is None:
            return None
        statuses.append(obs_match.group(1))
        payloads.append(obs_match.group(2))
    if example.text[spans[-1][1]:]:
        return None
    return _Decoded(
        instruction_text=task_match.group(1),
        actions=tuple(example.text[start:end] for start, end in spans),
        statuses=tuple(statuses),
        payloads=tuple(payloads),
    )


def example_occurrences(model: PolicyModel, example: SftExample) -> tuple[list, int]:
    """(context key, template index) pairs for one example, plus skip count."""
    if example.source != "trajectory":
        return [], 0
    decoded = _decode_trajectory_text(example)
    if decoded is None:
        return [], len(example.mask_spans)
    family = classify_instruction(decoded.instruction_text)
    occurrences, skipped = [], 0
    last_ok = None
    for step, action_text in enumerate(decoded.actions):
        last_status = decoded.statuses[step - 1] if step else "none"
        index = match_template(model.templates, decoded.instruction_text, last_ok, action_text)
        if index is None:
            skipped += 1
        else:
            occurrences.append((make_key(family, step, last_status), index))
        if step < len(decoded.statuses) and decoded.statuses[step] == "ok":
            last_ok = decoded.payloads[step]
    return occurrences, skipped


@dataclass
class _Workspace:
    keys: list[str]
    weights: np.ndarray
    ctx_idx: np.ndarray
    tmpl_idx: np.ndarray
    skipped: int


def _build_workspace(model: PolicyModel, dataset: MixedDataset) -> _Workspace:
    occurrences, skipped = [], 0
    for example in dataset.examples:
        occ, skip = example_occurrences(model, example)
        occurrences.extend(occ)
        skipped += skip
    keys = sorted({key for key, _ in occurrences})
    key_index = {key: i for i, key in enumerate(keys)}
    n_tmpl = model.n_templates
    weights = np.zeros((max(len(keys), 1), n_tmpl))
    for key, row in key_index.items():
        weights[row] = model.weights_for(key)
    ctx_idx = np.array([key_index[key] for key, _ in occurrences], dtype=np.int64)
    tmpl_idx = np.array([index for _, index in occurrences], dtype=np.int64)
    return _Workspace(keys=keys, weights=weights, ctx_idx=ctx_idx,
                      tmpl_idx=tmpl_idx, skipped=skipped)


def nll(model: PolicyModel, dataset: MixedDataset) -> float:
    """Masked negative log-likelihood of the dataset under the model."""
    ws = _build_workspace(model, dataset)
    return kernels.nll(ws.weights, ws.ctx_idx, ws.tmpl_idx)


def train(model: PolicyModel, dataset: MixedDataset,
          cfg: TrainConfig) -> tuple[PolicyModel, TrainReport]:
    """Gradient descent on the masked NLL; returns (new model, report).

    An effectively-empty dataset (nothing masked maps to a known template)
    skips training: the model comes back unchanged with ``report.noop`` set.
    """
    ws = _build_workspace(model, dataset)
    if len(ws.ctx_idx) == 0:
        return model, TrainReport(noop=True, skipped_unknown=ws.skipped)

    new_weights, curve = kernels.train(ws.weights, ws.ctx_idx, ws.tmpl_idx,
                                       cfg.lr_initial, cfg.lr_final, cfg.epochs)
    trained = model.copy()
    trained.version = model.version + 1
    for row, key in enumerate(ws.keys):
        trained.contexts[key] = new_weights[row].copy()
    report = TrainReport(
        loss_curve=[float(x) for x in curve],
        final_loss=float(curve[-1]),
        n_occurrences=int(len(ws.ctx_idx)),
        skipped_unknown=ws.skipped,
    )
    return trained, report


def grad_check(model: PolicyModel, dataset: MixedDataset, epsilon: float) -> float:
    """Max relative error between the analytic gradient and central differences."""
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValidationError("epsilon must be in [1e-7, 1e-3]")
    ws = _build_workspace(model, dataset)
    _, analytic = kernels.nll_grad(ws.weights, ws.ctx_idx, ws.tmpl_idx)
    if len(ws.ctx_idx) == 0:
        return float(np.abs(analytic).max()) if analytic.size else 0.0

    max_rel_error = 0.0
    weights = ws.weights
    for row in range(weights.shape[0]):
        for col in range(weights.shape[1]):
            original = weights[row, col]
            weights[row, col] = original + epsilon
            loss_plus = kernels.nll(weights, ws.ctx_idx, ws.tmpl_idx)
            weights[row, col] = original - epsilon
            loss_minus = kernels.nll(weights, ws.ctx_idx, ws.tmpl_idx)
            weights[row, col] = original
            numeric = (loss_plus - loss_minus) / (2 * epsilon)
            denom = max(abs(analytic[row, col]), abs(numeric), 1e-8)
            max_rel_error = max(max_rel_error, abs(analytic[row, col] - numeric) / denom)
    return max_rel_error
