import dataclasses

import pytest
import torch

from sft_adapter.convert import AdapterError, convert
from sft_adapter.model import load_model
from sft_adapter.train import FinetuneConfig, finetune


@pytest.fixture(scope="module")
def converted(fixture_export):
    return convert(fixture_export)


class TestFinetune:
    def test_fifty_copies_loss_decreases_monotonically(self, converted, tmp_path):
        examples, vocab, _ = converted
        copies = [examples[0]] * 50
        cfg = FinetuneConfig(epochs=12, batch_size=50, seed=0)  # full batch
        _, result = finetune(copies, vocab, cfg, tmp_path / "ckpt")
        losses = result.losses
        assert len(losses) == 12
        assert all(a > b for a, b in zip(losses[:10], losses[1:10]))

    def test_schedule_endpoints_in_run(self, converted, tmp_path):
        examples, vocab, _ = converted
        cfg = FinetuneConfig(epochs=3, batch_size=4, seed=0)
        _, result = finetune(examples, vocab, cfg, tmp_path / "ckpt")
        assert result.steps[0]["lr"] == 5e-5
        assert result.steps[-1]["lr"] == 5e-6

    def test_zero_supervised_tokens_refused(self, converted, tmp_path):
        examples, vocab, _ = converted
        stripped = [dataclasses.replace(e, supervised=tuple([False] * len(e.supervised)))
                    for e in examples]
        with pytest.raises(AdapterError, match="zero supervised"):
            finetune(stripped, vocab, FinetuneConfig(), tmp_path / "ckpt")

    def test_checkpoint_and_curve_written(self, converted, tmp_path):
        examples, vocab, _ = converted
        out = tmp_path / "ckpt"
        checkpoint, result = finetune(examples, vocab,
                                      FinetuneConfig(epochs=1, batch_size=8), out)
        for name in ("model.pt", "config.json", "vocab.json", "loss_curve.csv"):
            assert (checkpoint / name).exists()
        header = (checkpoint / "loss_curve.csv").read_text().splitlines()[0]
        assert header == "step,lr,loss"

    def test_checkpoint_round_trips(self, converted, tmp_path):
        examples, vocab, _ = converted
        checkpoint, _ = finetune(examples, vocab,
                                 FinetuneConfig(epochs=1, batch_size=8, seed=3),
                                 tmp_path / "ckpt")
        model, loaded_vocab = load_model(checkpoint)
        assert loaded_vocab.to_list() == vocab.to_list()
        ids = torch.tensor([[vocab.bos_id, *examples[0].token_ids[:10]]])
        with torch.no_grad():
            logits = model(ids)
        assert logits.shape == (1, 11, len(vocab))

    def test_training_reduces_loss_on_real_export(self, converted, tmp_path):
        examples, vocab, _ = converted
        cfg = FinetuneConfig(epochs=15, batch_size=len(examples), seed=0,
                             lr_initial=3e-3, lr_final=3e-4)
        _, result = finetune(examples, vocab, cfg, tmp_path / "ckpt")
        assert result.losses[-1] < result.losses[0]
