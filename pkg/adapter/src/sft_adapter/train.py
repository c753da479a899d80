"""Masked-NLL fine-tuning of the small causal LM.

Loss is cross-entropy on supervised target tokens only: position t is
supervised iff the token at t+1 (the prediction target) came from inside a
mask span. The learning rate follows the cosine schedule, first step
exactly lr_initial and last step exactly lr_final.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn

from .convert import AdapterError, TokenizedExample
from .model import TinyCausalLM, new_model, save_model
from .schedule import LR_FINAL_DEFAULT, LR_INITIAL_DEFAULT, step_lr
from .tokenizer import Vocab


@dataclass(frozen=True)
class FinetuneConfig:
    epochs: int = 4
    batch_size: int = 16
    lr_initial: float = LR_INITIAL_DEFAULT
    lr_final: float = LR_FINAL_DEFAULT
    seed: int = 0
    max_len: int = 512

    def __post_init__(self):
        if not self.lr_initial > self.lr_final > 0:
            raise AdapterError("learning rates must satisfy lr_initial > lr_final > 0")
        if self.epochs < 1 or self.batch_size < 1:
            raise AdapterError("epochs and batch_size must be positive")


@dataclass
class FinetuneResult:
    steps: list[dict] = field(default_factory=list)
    n_supervised_tokens: int = 0

    @property
    def losses(self) -> list[float]:
        return [s["loss"] for s in self.steps]

    def write_curve(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["step", "lr", "loss"])
            writer.writeheader()
            writer.writerows(self.steps)
        return path


def _encode_batch(batch: list[TokenizedExample], vocab: Vocab, max_len: int):
    """Pad to the longest sequence; returns (input ids, target ids, target mask)."""
    rows = []
    for example in batch:
        ids = [vocab.bos_id, *example.token_ids][:max_len]
        supervised = [False, *example.supervised][:max_len]
        rows.append((ids, supervised))
    width = max(len(ids) for ids, _ in rows)
    input_ids = torch.full((len(rows), width), vocab.pad_id, dtype=torch.long)
    supervised = torch.zeros((len(rows), width), dtype=torch.bool)
    for row, (ids, flags) in enumerate(rows):
        input_ids[row, :len(ids)] = torch.tensor(ids)
        supervised[row, :len(flags)] = torch.tensor(flags)
    # predicting token t+1 from prefix <= t: shift left
    targets = input_ids[:, 1:]
    target_mask = supervised[:, 1:]
    return input_ids[:, :-1], targets, target_mask


def masked_loss(model: TinyCausalLM, inputs, targets, target_mask) -> torch.Tensor:
    logits = model(inputs)
    flat = nn.functional.cross_entropy(
        logits.reshape(-1, logits.shape[-1]), targets.reshape(-1), reduction="none")
    mask = target_mask.reshape(-1).float()
    supervised = mask.sum()
    if supervised == 0:
        return torch.zeros((), requires_grad=True)
    return (flat * mask).sum() / supervised


def finetune(examples: list[TokenizedExample], vocab: Vocab, cfg: FinetuneConfig,
             out_dir: str | Path,
             model: TinyCausalLM | None = None) -> tuple[Path, FinetuneResult]:
    """Train, write checkpoint + loss curve CSV, return (checkpoint dir, result)."""
    n_supervised = sum(sum(e.supervised) for e in examples)
    if n_supervised == 0:
        raise AdapterError(
            "refusing to train: the dataset contains zero supervised tokens")

    torch.manual_seed(cfg.seed)
    if model is None:
        model = new_model(len(vocab), seed=cfg.seed, max_len=cfg.max_len)
    model.train()

    batches = [examples[i:i + cfg.batch_size]
               for i in range(0, len(examples), cfg.batch_size)]
    n_steps = cfg.epochs * len(batches)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr_initial)
    result = FinetuneResult(n_supervised_tokens=n_supervised)

    step = 0
    for _ in range(cfg.epochs):
        for batch in batches:
            lr = step_lr(step, n_steps, cfg.lr_initial, cfg.lr_final)
            for group in optimizer.param_groups:
                group["lr"] = lr
            optimizer.zero_grad()
            inputs, targets, target_mask = _encode_batch(batch, vocab, cfg.max_len)
            loss = masked_loss(model, inputs, targets, target_mask)
            loss.backward()
            optimizer.step()
            result.steps.append({"step": step, "lr": lr, "loss": float(loss.item())})
            step += 1

    model.eval()
    checkpoint = save_model(model, vocab, out_dir)
    result.write_curve(Path(out_dir) / "loss_curve.csv")
    return checkpoint, result
