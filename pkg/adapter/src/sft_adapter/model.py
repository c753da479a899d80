"""A small causal language model (decoder-only transformer) in plain torch.

Sized for desk-scale corpora: by default 2 layers, 2 heads, 64-dim
embeddings. Deterministic construction given a seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .tokenizer import Vocab


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 2
    n_layers: int = 2
    d_ff: int = 128
    max_len: int = 512
    dropout: float = 0.0


class CausalSelfAttention(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.n_heads = config.n_heads
        self.d_head = config.d_model // config.n_heads
        self.qkv = nn.Linear(config.d_model, 3 * config.d_model)
        self.proj = nn.Linear(config.d_model, config.d_model)

    def forward(self, x):
        batch, length, d_model = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)

        def split(t):
            return t.view(batch, length, self.n_heads, self.d_head).transpose(1, 2)

        q, k, v = split(q), split(k), split(v)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_head)
        causal = torch.triu(torch.ones(length, length, dtype=torch.bool,
                                       device=x.device), diagonal=1)
        scores = scores.masked_fill(causal, float("-inf"))
        out = torch.softmax(scores, dim=-1) @ v
        out = out.transpose(1, 2).reshape(batch, length, d_model)
        return self.proj(out)


class Block(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.ln1 = nn.LayerNorm(config.d_model)
        self.attn = CausalSelfAttention(config)
        self.ln2 = nn.LayerNorm(config.d_model)
        self.mlp = nn.Sequential(
            nn.Linear(config.d_model, config.d_ff),
            nn.GELU(),
            nn.Linear(config.d_ff, config.d_model),
        )

    def forward(self, x):
        x = x + self.attn(self.ln1(x))
        return x + self.mlp(self.ln2(x))


class TinyCausalLM(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.token_emb = nn.Embedding(config.vocab_size, config.d_model)
        self.pos_emb = nn.Embedding(config.max_len, config.d_model)
        self.blocks = nn.ModuleList(Block(config) for _ in range(config.n_layers))
        self.ln_out = nn.LayerNorm(config.d_model)
        self.head = nn.Linear(config.d_model, config.vocab_size, bias=False)

    def forward(self, token_ids):
        batch, length = token_ids.shape
        if length > self.config.max_len:
            raise ValueError(f"sequence length {length} exceeds max_len "
                             f"{self.config.max_len}")
        positions = torch.arange(length, device=token_ids.device)
        x = self.token_emb(token_ids) + self.pos_emb(positions)[None]
        for block in self.blocks:
            x = block(x)
        return self.head(self.ln_out(x))


def new_model(vocab_size: int, seed: int = 0, **overrides) -> TinyCausalLM:
    torch.manual_seed(seed)
    return TinyCausalLM(ModelConfig(vocab_size=vocab_size, **overrides))


def save_model(model: TinyCausalLM, vocab: Vocab, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out_dir / "model.pt")
    (out_dir / "config.json").write_text(json.dumps(asdict(model.config), indent=2) + "\n")
    (out_dir / "vocab.json").write_text(json.dumps(vocab.to_list()) + "\n")
    return out_dir


def load_model(checkpoint_dir: str | Path) -> tuple[TinyCausalLM, Vocab]:
    checkpoint_dir = Path(checkpoint_dir)
    config = ModelConfig(**json.loads((checkpoint_dir / "config.json").read_text()))
    vocab = Vocab.from_list(json.loads((checkpoint_dir / "vocab.json").read_text()))
    model = TinyCausalLM(config)
    model.load_state_dict(torch.load(checkpoint_dir / "model.pt", weights_only=True))
    model.eval()
    return model, vocab
