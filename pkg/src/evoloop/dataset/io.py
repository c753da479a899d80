"""Dataset export/import.

The JSONL export — one ``{source, text, mask_spans, origin_hash, iteration}``
record per line — is the contract consumed by downstream fine-tuning
adapters; offsets are character-exact and every record is re-validated at
the boundary in both directions.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import FormatError
from .builder import SftExample, validate_example
from .mixing import MixedDataset


def export_dataset(dataset: MixedDataset, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for example in dataset.examples:
            validate_example(example)
            record = {
                "source": example.source,
                "text": example.text,
                "mask_spans": [list(span) for span in example.mask_spans],
                "origin_hash": example.origin_hash,
                "iteration": dataset.iteration,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def load_dataset(path: str | Path) -> MixedDataset:
    path = Path(path)
    examples = []
    iteration = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                example = SftExample(
                    source=raw["source"],
                    text=raw["text"],
                    mask_spans=tuple((int(s), int(e)) for s, e in raw["mask_spans"]),
                    origin_hash=raw["origin_hash"],
                )
                iteration = raw["iteration"]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: bad dataset record: {exc}") from exc
            validate_example(example)
            examples.append(example)
    n_traj = sum(1 for e in examples if e.source == "trajectory")
    return MixedDataset(examples=tuple(examples), iteration=iteration,
                        n_trajectory=n_traj, n_general=len(examples) - n_traj)


def load_general_chat(path: str | Path) -> list[dict]:
    """Read the general-chat pool: JSONL of {id, prompt, reply}."""
    path = Path(path)
    out = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                out.append({"id": raw["id"], "prompt": raw["prompt"], "reply": raw["reply"]})
            except (json.JSONDecodeError, KeyError) as exc:
                raise FormatError(f"{path}:{lineno}: bad chat record: {exc}") from exc
    return out
