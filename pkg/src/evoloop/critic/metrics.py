"""Critic-vs-human agreement metrics.

Convention: "success" from the critic is the positive prediction, "success"
from the human label is the truth. Precision and recall are computed with
exact rational arithmetic; a ratio with a zero denominator is undefined and
reported as None, never as 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ..errors import FormatError, ValidationError

LABELS = ("success", "fail")


@dataclass(frozen=True)
class LabeledTrajectory:
    traj_hash: str
    human_label: str
    critic_label: str

    def __post_init__(self):
        if self.human_label not in LABELS or self.critic_label not in LABELS:
            raise ValidationError(
                f"labels must be 'success' or 'fail', got "
                f"({self.human_label!r}, {self.critic_label!r})")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    fp: int
    tn: int


@dataclass(frozen=True)
class CriticEvaluation:
    counts: ConfusionCounts
    precision: Fraction | None
    recall: Fraction | None

    @staticmethod
    def _percent(value: Fraction | None) -> float | None:
        return None if value is None else float(value * 100)

    @property
    def precision_percent(self) -> float | None:
        return self._percent(self.precision)

    @property
    def recall_percent(self) -> float | None:
        return self._percent(self.recall)


def evaluate_critic(labeled: list[LabeledTrajectory]) -> CriticEvaluation:
    if not labeled:
        raise ValidationError("cannot evaluate the critic on an empty labeled set")
    tp = sum(1 for L in labeled if L.human_label == "success" and L.critic_label == "success")
    fn = sum(1 for L in labeled if L.human_label == "success" and L.critic_label == "fail")
    fp = sum(1 for L in labeled if L.human_label == "fail" and L.critic_label == "success")
    tn = sum(1 for L in labeled if L.human_label == "fail" and L.critic_label == "fail")
    counts = ConfusionCounts(tp=tp, fn=fn, fp=fp, tn=tn)
    precision = Fraction(tp, tp + fp) if tp + fp else None
    recall = Fraction(tp, tp + fn) if tp + fn else None
    return CriticEvaluation(counts=counts, precision=precision, recall=recall)


def load_labeled_file(path: str | Path) -> list[LabeledTrajectory]:
    """Read a JSONL file of {traj_hash, human_label, critic_label} records."""
    path = Path(path)
    out = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                out.append(LabeledTrajectory(raw["traj_hash"], raw["human_label"],
                                             raw["critic_label"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise FormatError(f"{path}:{lineno}: bad labeled record: {exc}") from exc
    return out
