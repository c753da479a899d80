"""Operator entry point.

Subcommands: ``evolve`` (full loop), the single-stage commands ``sample``,
``score``, ``select``, ``build``, ``train``, ``eval`` (stage-isolated
debugging; composing them reproduces ``evolve``'s artifacts byte-for-byte),
``critic-eval`` (critic calibration against human labels) and ``inspect``
(environment summary).

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import RunConfig, load_config
from .critic.metrics import evaluate_critic, load_labeled_file
from .critic.scoring import CriticVerdict
from .errors import ConfigError, EvoloopError, FormatError
from .loop.driver import (
    PipelineState,
    StageFailure,
    iter_dir,
    run_evolution,
    stage_build,
    stage_eval,
    stage_sample,
    stage_score,
    stage_select,
    stage_train,
)
from .dataset.io import load_dataset
from .resources import resolve_path
from .store.trajectories import load_trajectories


def _usage_fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _runtime_fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_config_or_die(path: str) -> RunConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        _usage_fail(str(exc))


def _check_run_dir(run_dir: str) -> Path:
    path = Path(run_dir)
    if not path.parent.exists():
        _usage_fail(f"run-dir parent directory does not exist: {path.parent}")
    return path


def _init_state(config_path: str, run_dir: str) -> PipelineState:
    config = _load_config_or_die(config_path)
    path = _check_run_dir(run_dir)
    try:
        return PipelineState.initialize(config, path)
    except (ConfigError, FormatError, EvoloopError) as exc:
        _usage_fail(str(exc))


def _require_file(path: Path) -> Path:
    if not path.exists():
        _usage_fail(f"missing expected file: {path}")
    return path


_CONFIG_OPT = click.option("--config", "config_path", required=True,
                           type=click.Path(exists=True, dir_okay=False),
                           help="JSON run configuration")
_RUN_DIR_OPT = click.option("--run-dir", required=True, help="run artifact directory")
_ITERATION_OPT = click.option("--iteration", type=int, default=1, show_default=True,
                              help="1-based iteration index")


@click.group()
def main():
    """Iterative agent evolution pipeline."""


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@click.option("--iterations", type=int, default=None,
              help="override loop.iterations from the config")
def evolve(config_path, run_dir, iterations):
    """Run the full evolution loop and print the accuracy table."""
    config = _load_config_or_die(config_path)
    path = _check_run_dir(run_dir)
    rounds = iterations if iterations is not None else config.loop.iterations
    if rounds < 1:
        _usage_fail("--iterations must be >= 1")
    try:
        manifest = run_evolution(config, rounds, path)
    except StageFailure as exc:
        _runtime_fail(str(exc))
    except EvoloopError as exc:
        _usage_fail(str(exc))
    click.echo("iteration  eval_accuracy")
    click.echo(f"{0:>9}  {manifest.baseline_accuracy:.4f}  (untrained baseline)")
    for report in manifest.reports:
        click.echo(f"{report.iteration:>9}  {report.eval_accuracy:.4f}")


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def sample(config_path, run_dir, iteration):
    """Sample N x K trajectories for one iteration."""
    state = _init_state(config_path, run_dir)
    try:
        state.load_model_for_iteration(iteration)
        trajectories = stage_sample(state, iteration)
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    click.echo(f"sampled {len(trajectories)} trajectories "
               f"-> {iter_dir(state.run_dir, iteration) / 'trajectories.jsonl'}")


def _load_scored(state: PipelineState, iteration: int):
    directory = iter_dir(state.run_dir, iteration)
    trajectories = load_trajectories(_require_file(directory / "trajectories.jsonl"))
    scoreable = [t for t in trajectories if t.status != "backend_error"]
    verdicts = []
    with _require_file(directory / "verdicts.jsonl").open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                raw = json.loads(line)
                verdicts.append(CriticVerdict(raw["traj_hash"], raw["score"],
                                              raw["rationale"], raw["backend"],
                                              raw["parse_ok"]))
    if len(verdicts) != len(scoreable):
        _usage_fail(f"verdicts.jsonl has {len(verdicts)} records for "
                    f"{len(scoreable)} scoreable trajectories")
    for trajectory, verdict in zip(scoreable, verdicts):
        if trajectory.traj_hash != verdict.traj_hash:
            _usage_fail(f"verdict order mismatch at {verdict.traj_hash}")
    return list(zip(scoreable, verdicts))


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def score(config_path, run_dir, iteration):
    """Score previously sampled trajectories."""
    state = _init_state(config_path, run_dir)
    path = iter_dir(state.run_dir, iteration) / "trajectories.jsonl"
    try:
        trajectories = load_trajectories(_require_file(path))
        scored = stage_score(state, iteration, trajectories)
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    click.echo(f"scored {len(scored)} trajectories")


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def select(config_path, run_dir, iteration):
    """Select the top-p% eligible trajectories."""
    state = _init_state(config_path, run_dir)
    try:
        selected = stage_select(state, iteration, _load_scored(state, iteration))
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    click.echo(f"selected {len(selected)} trajectories")


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def build(config_path, run_dir, iteration):
    """Build the masked SFT dataset from the selection."""
    state = _init_state(config_path, run_dir)
    path = iter_dir(state.run_dir, iteration) / "selected.jsonl"
    try:
        selected = load_trajectories(_require_file(path))
        dataset = stage_build(state, iteration, selected)
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    click.echo(f"dataset: {dataset.n_trajectory} trajectory + {dataset.n_general} general examples")


@main.command()
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def train(config_path, run_dir, iteration):
    """Fine-tune the tabular policy on the built dataset."""
    state = _init_state(config_path, run_dir)
    path = iter_dir(state.run_dir, iteration) / "dataset.jsonl"
    try:
        _require_file(path)
        state.load_model_for_iteration(iteration)
        dataset = load_dataset(path)
        report = stage_train(state, iteration, dataset)
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    if report.noop:
        click.echo("empty effective dataset: training skipped (model unchanged)")
    else:
        click.echo(f"trained to version {state.model.version}, "
                   f"final loss {report.final_loss:.6f}")


@main.command("eval")
@_CONFIG_OPT
@_RUN_DIR_OPT
@_ITERATION_OPT
def eval_cmd(config_path, run_dir, iteration):
    """Evaluate the iteration's checkpoint on the eval split."""
    state = _init_state(config_path, run_dir)
    checkpoint = iter_dir(state.run_dir, iteration) / "checkpoint.json"
    try:
        if state.config.actor.kind == "tabular":
            from .trainer.policy import load_checkpoint

            state.model = load_checkpoint(_require_file(checkpoint))
        accuracy = stage_eval(state, iteration)
    except FormatError as exc:
        _usage_fail(str(exc))
    except EvoloopError as exc:
        _runtime_fail(str(exc))
    click.echo(f"eval_accuracy: {accuracy:.4f}")


@main.command("critic-eval")
@click.option("--labels", "labels_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSONL of {traj_hash, human_label, critic_label}")
def critic_eval(labels_path):
    """Compare critic labels against human labels."""
    try:
        labeled = load_labeled_file(labels_path)
    except FormatError as exc:
        _usage_fail(str(exc))
    if not labeled:
        _usage_fail(f"labels file is empty: {labels_path}")
    result = evaluate_critic(labeled)
    counts = result.counts
    click.echo(f"TP={counts.tp} FN={counts.fn} FP={counts.fp} TN={counts.tn}")
    precision = result.precision_percent
    recall = result.recall_percent
    click.echo("precision: " + (f"{precision:.2f}%" if precision is not None else "undefined"))
    click.echo("recall: " + (f"{recall:.2f}%" if recall is not None else "undefined"))


@main.command()
@_CONFIG_OPT
def inspect(config_path):
    """Summarize the configured environment."""
    config = _load_config_or_die(config_path)
    from .env.instructions import instructions_load
    from .env.registry import registry_load

    try:
        registry = registry_load(resolve_path(config.env.registry_path))
        instructions = instructions_load(resolve_path(config.env.instructions_path))
    except EvoloopError as exc:
        _usage_fail(str(exc))
    click.echo(f"registry: {len(registry)} apis")
    for spec in registry:
        params = ", ".join(f"{p.name}:{p.type}" for p in spec.params) or "(none)"
        click.echo(f"  {spec.name}({params}) - {spec.description}")
    n_train = sum(1 for i in instructions if i.split == "train")
    n_eval = len(instructions) - n_train
    click.echo(f"instructions: {len(instructions)} total ({n_train} train, {n_eval} eval)")


if __name__ == "__main__":
    main()
