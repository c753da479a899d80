"""sft-adapter command line: convert, train, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .convert import AdapterError, convert
from .schedule import LR_FINAL_DEFAULT, LR_INITIAL_DEFAULT
from .train import FinetuneConfig, finetune


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Fine-tune a small causal LM on a masked SFT dataset export."""


@main.command("convert")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--report", "report_path", default=None,
              help="write the coverage report JSON here")
def convert_cmd(dataset_path, report_path):
    """Validate span->token supervision coverage for an export."""
    try:
        examples, vocab, report = convert(dataset_path)
    except AdapterError as exc:
        _fail(str(exc), code=2)
    if report_path:
        Path(report_path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    click.echo(f"examples: {report.n_examples}, vocab: {len(vocab)}, "
               f"supervised tokens: {report.n_supervised_tokens}, "
               f"coverage discrepancies: {report.n_discrepancies}")
    if report.n_discrepancies:
        _fail("coverage discrepancies found; see the report")


@main.command("train")
@click.option("--dataset", "dataset_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True)
@click.option("--epochs", type=int, default=4, show_default=True)
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--lr-initial", type=float, default=LR_INITIAL_DEFAULT, show_default=True)
@click.option("--lr-final", type=float, default=LR_FINAL_DEFAULT, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train_cmd(dataset_path, out_dir, epochs, batch_size, lr_initial, lr_final, seed):
    """Fine-tune on an export; writes checkpoint + loss_curve.csv."""
    try:
        examples, vocab, report = convert(dataset_path)
        if report.n_discrepancies:
            _fail("coverage discrepancies found; refusing to train", code=2)
        cfg = FinetuneConfig(epochs=epochs, batch_size=batch_size,
                             lr_initial=lr_initial, lr_final=lr_final, seed=seed)
        checkpoint, result = finetune(examples, vocab, cfg, out_dir)
    except AdapterError as exc:
        _fail(str(exc))
    first, last = result.steps[0], result.steps[-1]
    click.echo(f"checkpoint: {checkpoint}")
    click.echo(f"steps: {len(result.steps)}, lr {first['lr']:g} -> {last['lr']:g}, "
               f"loss {first['loss']:.4f} -> {last['loss']:.4f}")


@main.command("serve")
@click.option("--checkpoint", "checkpoint_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8100, show_default=True)
def serve_cmd(checkpoint_dir, host, port):
    """Serve the checkpoint over the chat-completions protocol."""
    try:
        from .serve import create_app

        app = create_app(checkpoint_dir)
        import uvicorn

        uvicorn.run(app, host=host, port=port, log_level="warning")
    except AdapterError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
