"""Deterministic tokenizer with character offset mapping.

Tokens are maximal runs of word characters, non-word-non-space characters,
or whitespace; together they partition the text, so every character belongs
to exactly one token and span coverage can be reasoned about exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

TOKEN_RE = re.compile(r"\w+|[^\w\s]+|\s+")

PAD, UNK, BOS = "<pad>", "<unk>", "<bos>"
SPECIALS = (PAD, UNK, BOS)


@dataclass(frozen=True)
class TokenSpan:
    text: str
    start: int
    end: int


def tokenize_with_offsets(text: str) -> list[TokenSpan]:
    return [TokenSpan(m.group(0), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


class Vocab:
    def __init__(self, tokens: list[str]):
        self.id_to_token = list(SPECIALS) + sorted(set(tokens) - set(SPECIALS))
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}

    def __len__(self) -> int:
        return len(self.id_to_token)

    def encode(self, token: str) -> int:
        return self.token_to_id.get(token, self.token_to_id[UNK])

    @property
    def pad_id(self) -> int:
        return self.token_to_id[PAD]

    @property
    def bos_id(self) -> int:
        return self.token_to_id[BOS]

    def to_list(self) -> list[str]:
        return list(self.id_to_token)

    @staticmethod
    def from_list(tokens: list[str]) -> "Vocab":
        vocab = Vocab.__new__(Vocab)
        vocab.id_to_token = list(tokens)
        vocab.token_to_id = {t: i for i, t in enumerate(tokens)}
        return vocab


def build_vocab(texts: list[str]) -> Vocab:
    tokens: list[str] = []
    for text in texts:
        tokens.extend(span.text for span in tokenize_with_offsets(text))
    return Vocab(tokens)
