"""Ground-truth answer checking.

Deterministic substitutes for human answer review. All checkers are total:
any candidate string yields accept or reject, never an error.

Normalization rule (stated, testable): lowercase, trim surrounding
whitespace, strip one terminal punctuation mark (``. ! ?``).
"""

from __future__ import annotations

import re

from .instructions import Instruction

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")


def normalize_answer(text: str) -> str:
    out = text.strip().lower()
    if out and out[-1] in ".!?":
        out = out[:-1].rstrip()
    return out


def _extract_number(text: str) -> float | None:
    """Parse the candidate as a number, else fall back to its last numeric token."""
    normalized = normalize_answer(text)
    try:
        return float(normalized)
    except ValueError:
        pass
    matches = _NUMBER_RE.findall(normalized)
    if not matches:
        return None
    try:
        return float(matches[-1])
    except ValueError:  # pragma: no cover - regex guarantees parseability
        return None


def check_answer(instruction: Instruction, answer: str) -> bool:
    """Accept or reject a candidate answer per the instruction's checker."""
    checker = instruction.checker
    if checker.kind == "exact":
        return normalize_answer(answer) == normalize_answer(str(checker.truth))
    if checker.kind == "numeric":
        value = _extract_number(answer)
        if value is None:
            return False
        truth = float(checker.truth)
        return abs(value - truth) <= checker.tolerance * max(abs(truth), 1.0)
    if checker.kind == "substring_set":
        normalized = normalize_answer(answer)
        return all(normalize_answer(str(s)) in normalized for s in checker.truth)
    return False
