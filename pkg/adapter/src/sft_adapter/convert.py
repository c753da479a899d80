"""Dataset conversion: character mask spans -> token-level supervision.

Supervision rule (stated): a token is supervised iff its character span
overlaps a mask span; a token straddling a span edge is supervised. The
coverage report verifies, per example, that every masked character is
covered by some supervised token and that every supervised token actually
overlaps a span — any violation is a discrepancy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .tokenizer import TokenSpan, Vocab, build_vocab, tokenize_with_offsets


class AdapterError(Exception):
    """Malformed input or an unsatisfiable training request."""


@dataclass(frozen=True)
class TokenizedExample:
    source: str
    origin_hash: str
    token_ids: tuple[int, ...]
    supervised: tuple[bool, ...]
    offsets: tuple[tuple[int, int], ...]
    text: str
    mask_spans: tuple[tuple[int, int], ...]


@dataclass
class CoverageReport:
    n_examples: int = 0
    n_supervised_tokens: int = 0
    discrepancies: list[dict] = field(default_factory=list)

    @property
    def n_discrepancies(self) -> int:
        return len(self.discrepancies)

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "n_supervised_tokens": self.n_supervised_tokens,
            "n_discrepancies": self.n_discrepancies,
            "discrepancies": self.discrepancies,
        }


def _overlaps(token: TokenSpan, spans) -> bool:
    return any(token.start < end and start < token.end for start, end in spans)


def load_export(path: str | Path) -> list[dict]:
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                record = {
                    "source": raw["source"],
                    "text": raw["text"],
                    "mask_spans": [(int(s), int(e)) for s, e in raw["mask_spans"]],
                    "origin_hash": str(raw["origin_hash"]),
                }
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise AdapterError(f"{path}:{lineno}: bad dataset record: {exc}") from exc
            for start, end in record["mask_spans"]:
                if not 0 <= start < end <= len(record["text"]):
                    raise AdapterError(
                        f"{path}:{lineno}: span ({start}, {end}) out of bounds")
            records.append(record)
    return records


def tokenize_record(record: dict, vocab: Vocab) -> TokenizedExample:
    tokens = tokenize_with_offsets(record["text"])
    spans = record["mask_spans"]
    return TokenizedExample(
        source=record["source"],
        origin_hash=record["origin_hash"],
        token_ids=tuple(vocab.encode(t.text) for t in tokens),
        supervised=tuple(_overlaps(t, spans) for t in tokens),
        offsets=tuple((t.start, t.end) for t in tokens),
        text=record["text"],
        mask_spans=tuple(spans),
    )


def check_coverage(example: TokenizedExample, index: int, report: CoverageReport):
    """Character-level coverage equivalence modulo the straddling-token rule."""
    covered = [False] * len(example.text)
    for (start, end), supervised in zip(example.offsets, example.supervised):
        if supervised:
            for position in range(start, end):
                covered[position] = True
    uncovered = [
        position
        for span_start, span_end in example.mask_spans
        for position in range(span_start, span_end)
        if not covered[position]
    ]
    stray_tokens = [
        offsets
        for offsets, supervised in zip(example.offsets, example.supervised)
        if supervised and not _overlaps(TokenSpan("", *offsets), example.mask_spans)
    ]
    if uncovered or stray_tokens:
        report.discrepancies.append({
            "example": index,
            "origin_hash": example.origin_hash,
            "uncovered_span_chars": uncovered[:20],
            "stray_supervised_tokens": stray_tokens[:20],
        })


def convert(dataset_path: str | Path,
            vocab: Vocab | None = None) -> tuple[list[TokenizedExample], Vocab, CoverageReport]:
    """Tokenize an export; returns (examples, vocab, coverage report)."""
    records = load_export(dataset_path)
    if vocab is None:
        vocab = build_vocab([r["text"] for r in records])
    report = CoverageReport(n_examples=len(records))
    examples = []
    for index, record in enumerate(records):
        example = tokenize_record(record, vocab)
        check_coverage(example, index, report)
        report.n_supervised_tokens += sum(example.supervised)
        examples.append(example)
    return examples, vocab, report
