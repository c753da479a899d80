"""The iterative evolution driver.

Each iteration runs five stages — sample, score, select, build, train —
followed by evaluation, persisting every intermediate artifact under
``run_dir/iter_<i>/`` before the next stage runs:

    run_dir/
      manifest.json           config snapshot, per-iteration reports, artifacts
      ledger.jsonl            cross-iteration exclusion ledger (shared)
      accuracy.csv            accuracy-vs-iteration table
      iter_<i>/trajectories.jsonl verdicts.jsonl selected.jsonl
               dataset.jsonl checkpoint.json eval.json report.json

The same stage functions back both the monolithic runner and the
single-stage CLI commands, so composing stages reproduces the monolithic
artifacts byte-for-byte under hermetic backends. The eval split is never
sampled for training, never scored, and never enters a dataset (guarded at
runtime).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..actor.backends import RemoteBackend, ScriptedBackend, TabularPolicyBackend, derive_seed
from ..actor.remote import ChatCompletionsClient, EndpointConfig
from ..actor.sampling import SamplingConfig, sample_trajectories
from ..config import RunConfig
from ..critic.scoring import OracleCritic, RemoteCritic, score_trajectories
from ..dataset.builder import build_sft_example
from ..dataset.io import export_dataset, load_general_chat
from ..dataset.mixing import MixedDataset, mix
from ..env.instructions import instructions_load
from ..env.registry import registry_load
from ..errors import EvoloopError, FormatError, LeakageError
from ..resources import resolve_path
from ..selection import SelectionConfig, select
from ..store.ledger import ExclusionLedger
from ..store.trajectories import Trajectory, persist_trajectories
from ..trainer.policy import PolicyModel, load_checkpoint, save_checkpoint
from ..trainer.training import TrainConfig, TrainReport, train
from .evaluation import evaluate

STAGES = ("sample", "score", "select", "build", "train", "eval")


class StageFailure(EvoloopError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class IterationReport:
    iteration: int
    n_sampled: int
    n_selected: int
    eval_accuracy: float
    train_loss_final: float | None
    model_version: int
    wall_time: float

    def __post_init__(self):
        if self.n_selected > self.n_sampled:
            raise ValueError("n_selected cannot exceed n_sampled")
        if not 0.0 <= self.eval_accuracy <= 1.0:
            raise ValueError("eval_accuracy must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "n_sampled": self.n_sampled,
            "n_selected": self.n_selected,
            "eval_accuracy": self.eval_accuracy,
            "train_loss_final": self.train_loss_final,
            "model_version": self.model_version,
            "wall_time": self.wall_time,
        }


@dataclass
class RunManifest:
    config: dict
    baseline_accuracy: float
    reports: list[IterationReport] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    failure: dict | None = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "baseline_accuracy": self.baseline_accuracy,
            "reports": [r.to_dict() for r in self.reports],
            "artifacts": self.artifacts,
            "failure": self.failure,
        }


@dataclass
class PipelineState:
    config: RunConfig
    run_dir: Path
    registry: list
    train_instructions: list
    eval_instructions: list
    instructions_by_id: dict
    general_pool: list
    ledger: ExclusionLedger
    model: PolicyModel

    @staticmethod
    def initialize(config: RunConfig, run_dir: str | Path) -> "PipelineState":
        run_dir = Path(run_dir)
        registry = registry_load(resolve_path(config.env.registry_path))
        instructions = instructions_load(resolve_path(config.env.instructions_path))
        general_pool = load_general_chat(resolve_path(config.dataset.general_chat_path))
        return PipelineState(
            config=config,
            run_dir=run_dir,
            registry=registry,
            train_instructions=[i for i in instructions if i.split == "train"],
            eval_instructions=[i for i in instructions if i.split == "eval"],
            instructions_by_id={i.id: i for i in instructions},
            general_pool=general_pool,
            ledger=ExclusionLedger(run_dir / "ledger.jsonl"),
            model=PolicyModel(),
        )

    def load_model_for_iteration(self, iteration: int):
        """Rehydrate the model the way a fresh process would (stage commands)."""
        if iteration <= 1:
            self.model = PolicyModel()
            return
        checkpoint = iter_dir(self.run_dir, iteration - 1) / "checkpoint.json"
        if not checkpoint.exists():
            raise FormatError(f"missing upstream artifact: {checkpoint}")
        self.model = load_checkpoint(checkpoint)


def iter_dir(run_dir: str | Path, iteration: int) -> Path:
    return Path(run_dir) / f"iter_{iteration}"


def build_actor_backend(state: PipelineState):
    actor = state.config.actor
    if actor.kind == "tabular":
        return TabularPolicyBackend(state.model, temperature=state.config.sampling.temperature)
    if actor.kind == "scripted":
        raw = json.loads(resolve_path(actor.script_path).read_text(encoding="utf-8"))
        return ScriptedBackend(raw)
    endpoint = EndpointConfig(base_url=actor.base_url, model=actor.model,
                              temperature=actor.temperature, timeout_s=actor.timeout_s,
                              auth_env=actor.auth_env, max_in_flight=actor.max_in_flight)
    return RemoteBackend(endpoint)


def build_critic(state: PipelineState):
    critic = state.config.critic
    if critic.backend == "oracle":
        return OracleCritic()
    endpoint = EndpointConfig(base_url=critic.base_url, model=critic.model,
                              temperature=critic.temperature, timeout_s=critic.timeout_s,
                              auth_env=critic.auth_env, max_in_flight=critic.max_in_flight)
    return RemoteCritic(ChatCompletionsClient(endpoint), temperature=critic.temperature)


def stage_sample(state: PipelineState, iteration: int) -> list[Trajectory]:
    for instruction in state.train_instructions:
        if instruction.split != "train":
            raise LeakageError(f"instruction {instruction.id} is not in the train split")
    cfg = SamplingConfig(
        k=state.config.sampling.k,
        m=state.config.sampling.m,
        temperature=state.config.sampling.temperature,
        seed=derive_seed(state.config.sampling.seed, "sample", iteration),
    )
    backend = build_actor_backend(state)
    trajectories = sample_trajectories(state.train_instructions, backend, cfg,
                                       state.registry, iteration=iteration)
    persist_trajectories(trajectories, iter_dir(state.run_dir, iteration) / "trajectories.jsonl")
    return trajectories


def stage_score(state: PipelineState, iteration: int, trajectories) -> list:
    critic = build_critic(state)
    scoreable = [t for t in trajectories if t.status != "backend_error"]
    in_flight = state.config.critic.max_in_flight if state.config.critic.backend == "remote" else 1
    verdicts = score_trajectories(scoreable, state.instructions_by_id, critic,
                                  max_in_flight=in_flight)
    path = iter_dir(state.run_dir, iteration) / "verdicts.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for verdict in verdicts:
            fh.write(json.dumps({
                "traj_hash": verdict.traj_hash,
                "score": verdict.score,
                "rationale": verdict.rationale,
                "backend": verdict.backend,
                "parse_ok": verdict.parse_ok,
            }, ensure_ascii=False) + "\n")
    return list(zip(scoreable, verdicts))


def stage_select(state: PipelineState, iteration: int, scored) -> list[Trajectory]:
    cfg = SelectionConfig(p_percent=state.config.selection.p_percent,
                          min_score_floor=state.config.selection.min_score_floor)
    selected = select(scored, state.ledger, cfg, iteration=iteration)
    persist_trajectories(selected, iter_dir(state.run_dir, iteration) / "selected.jsonl")
    return selected


def stage_build(state: PipelineState, iteration: int, selected) -> MixedDataset:
    examples = []
    for trajectory in selected:
        instruction = state.instructions_by_id.get(trajectory.instruction_id)
        if instruction is None:
            raise FormatError(f"unknown instruction id {trajectory.instruction_id}")
        if instruction.split != "train":
            raise LeakageError(
                f"eval instruction {instruction.id} reached the training dataset")
        examples.append(build_sft_example(trajectory, instruction))
    dataset = mix(examples, state.general_pool,
                  seed=derive_seed(state.config.sampling.seed, "mix", iteration),
                  iteration=iteration)
    export_dataset(dataset, iter_dir(state.run_dir, iteration) / "dataset.jsonl")
    return dataset


def stage_train(state: PipelineState, iteration: int, dataset: MixedDataset) -> TrainReport:
    cfg = TrainConfig(lr_initial=state.config.trainer.lr_initial,
                      lr_final=state.config.trainer.lr_final,
                      epochs=state.config.trainer.epochs,
                      seed=state.config.sampling.seed)
    state.model, report = train(state.model, dataset, cfg)
    save_checkpoint(state.model, iter_dir(state.run_dir, iteration) / "checkpoint.json")
    return report


def eval_target(state: PipelineState):
    return state.model if state.config.actor.kind == "tabular" else build_actor_backend(state)


def stage_eval(state: PipelineState, iteration: int) -> float:
    accuracy = evaluate(eval_target(state), state.eval_instructions, state.registry,
                        state.config.sampling.m)
    path = iter_dir(state.run_dir, iteration) / "eval.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"eval_accuracy": accuracy, "n_eval": len(state.eval_instructions)}
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return accuracy


def run_iteration(state: PipelineState, iteration: int) -> IterationReport:
    """One full pass; any stage failure aborts with the stage named."""
    started = time.perf_counter()
    current = "sample"
    try:
        trajectories = stage_sample(state, iteration)
        current = "score"
        scored = stage_score(state, iteration, trajectories)
        current = "select"
        selected = stage_select(state, iteration, scored)
        current = "build"
        dataset = stage_build(state, iteration, selected)
        current = "train"
        train_report = stage_train(state, iteration, dataset)
        current = "eval"
        accuracy = stage_eval(state, iteration)
    except Exception as exc:
        raise StageFailure(current, exc) from exc

    report = IterationReport(
        iteration=iteration,
        n_sampled=len(trajectories),
        n_selected=len(selected),
        eval_accuracy=accuracy,
        train_loss_final=None if train_report.noop else train_report.final_loss,
        model_version=state.model.version,
        wall_time=time.perf_counter() - started,
    )
    report_path = iter_dir(state.run_dir, iteration) / "report.json"
    report_path.write_text(json.dumps(report.to_dict()) + "\n", encoding="utf-8")
    return report


def _artifact_paths(iteration: int) -> dict:
    names = ("trajectories.jsonl", "verdicts.jsonl", "selected.jsonl",
             "dataset.jsonl", "checkpoint.json", "eval.json", "report.json")
    return {name.split(".")[0]: f"iter_{iteration}/{name}" for name in names}


def write_accuracy_csv(run_dir: Path, reports: list[IterationReport]) -> Path:
    path = Path(run_dir) / "accuracy.csv"
    lines = ["iteration,eval_accuracy"]
    lines += [f"{r.iteration},{r.eval_accuracy!r}" for r in reports]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_manifest(run_dir: Path, manifest: RunManifest):
    path = Path(run_dir) / "manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")


def run_evolution(config: RunConfig, iterations: int, run_dir: str | Path) -> RunManifest:
    """R sequential iterations sharing one ledger; emits manifest + accuracy table."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    state = PipelineState.initialize(config, run_dir)
    baseline = evaluate(eval_target(state), state.eval_instructions, state.registry,
                        config.sampling.m)
    manifest = RunManifest(config=config.to_dict(), baseline_accuracy=baseline)
    for iteration in range(1, iterations + 1):
        try:
            report = run_iteration(state, iteration)
        except StageFailure as failure:
            manifest.failure = {"iteration": iteration, "stage": failure.stage,
                                "error": str(failure.cause)}
            _write_manifest(run_dir, manifest)
            raise
        manifest.reports.append(report)
        manifest.artifacts[f"iter_{iteration}"] = _artifact_paths(iteration)
        write_accuracy_csv(run_dir, manifest.reports)
        _write_manifest(run_dir, manifest)
    return manifest
