import json
import math

import pytest

from evoloop.actor.backends import ScriptedBackend
from evoloop.config import config_from_dict
from evoloop.errors import ValidationError
from evoloop.loop import evaluate, run_evolution
from evoloop.loop.driver import PipelineState, StageFailure, run_iteration
from evoloop.trainer.policy import PolicyModel
from evoloop.trainer.templates import DEFAULT_TEMPLATES, render_template


def desk_config(seed=0, **overrides):
    raw = {"sampling": {"seed": seed, "temperature": 1.0}}
    raw.update(overrides)
    return config_from_dict(raw)


def gold_backend(instructions):
    scripts = {}
    for instr in instructions:
        call = next(t for t in DEFAULT_TEMPLATES if t.api_name == instr.relevant_apis[0])
        scripts[instr.id] = [render_template(call, instr.text, None), "__finish_last__"]
    return GoldBackend(scripts)


class GoldBackend(ScriptedBackend):
    """Plays the right call, then finishes with the observed payload."""

    def generate(self, prompt, *, instruction, history, sample_index, rng, temperature):
        raw = super().generate(prompt, instruction=instruction, history=history,
                               sample_index=sample_index, rng=rng, temperature=temperature)
        if raw == "__finish_last__":
            payload = next((o.payload for _, o in reversed(list(history))
                            if o.status == "ok"), "unknown")
            return f"FINISH {payload}"
        return raw


class NeverFinishBackend(ScriptedBackend):
    def generate(self, prompt, **kwargs):
        return 'CALL todo_list {}'


class TestEvaluate:
    def test_perfect_backend_scores_one(self, eval_instructions, registry):
        backend = gold_backend(eval_instructions)
        assert evaluate(backend, eval_instructions, registry, round_cap=5) == 1.0

    def test_never_finishing_backend_scores_zero(self, eval_instructions, registry):
        assert evaluate(NeverFinishBackend({}), eval_instructions, registry,
                        round_cap=5) == 0.0

    def test_untrained_policy_baseline_is_zero(self, eval_instructions, registry):
        # fixes the acceptance baseline b0: greedy over an all-zero table
        assert evaluate(PolicyModel(), eval_instructions, registry, round_cap=5) == 0.0

    def test_empty_eval_split_rejected(self, registry):
        with pytest.raises(ValidationError):
            evaluate(PolicyModel(), [], registry, round_cap=5)


class TestRunIteration:
    def test_desk_iteration_counts(self, tmp_path):
        state = PipelineState.initialize(desk_config(), tmp_path / "run")
        report = run_iteration(state, 1)
        assert report.n_sampled == 100  # 20 train instructions x K=5

        # n_selected is exactly ceil(10% of the eligible pool): score >= 1,
        # deduplicated by content hash (ledger was empty on iteration 1)
        with open(tmp_path / "run" / "iter_1" / "trajectories.jsonl") as fh:
            hashes = [json.loads(line)["traj_hash"] for line in fh]
        with open(tmp_path / "run" / "iter_1" / "verdicts.jsonl") as fh:
            scores = [json.loads(line)["score"] for line in fh]
        eligible = {h for h, s in zip(hashes, scores) if s >= 1}
        assert report.n_selected == min(math.ceil(0.1 * len(eligible)), len(eligible))
        assert report.model_version == 1
        directory = tmp_path / "run" / "iter_1"
        for name in ("trajectories.jsonl", "verdicts.jsonl", "selected.jsonl",
                     "dataset.jsonl", "checkpoint.json", "eval.json", "report.json"):
            assert (directory / name).exists()

    def test_ledger_blocks_resampled_duplicates(self, tmp_path):
        state = PipelineState.initialize(desk_config(), tmp_path / "run")
        run_iteration(state, 1)
        used_after_first = set(state.ledger.used_hashes)
        run_iteration(state, 2)
        with open(tmp_path / "run" / "iter_2" / "selected.jsonl") as fh:
            second = {json.loads(line)["traj_hash"] for line in fh}
        assert not (second & used_after_first)

    def test_empty_selection_trains_noop(self, tmp_path, monkeypatch):
        # force an empty selection by raising the score floor above the oracle max
        config = desk_config(selection={"p_percent": 10, "min_score_floor": 11})
        state = PipelineState.initialize(config, tmp_path / "run")
        report = run_iteration(state, 1)
        assert report.n_selected == 0
        assert report.train_loss_final is None
        assert report.model_version == 0
        assert report.eval_accuracy == 0.0

    def test_bad_general_pool_fails_at_init(self, tmp_path):
        config = desk_config(dataset={"general_chat_path": "builtin:apis.json"})
        with pytest.raises(Exception):
            PipelineState.initialize(config, tmp_path / "run")


class TestRunEvolution:
    def test_manifest_shape(self, tmp_path):
        manifest = run_evolution(desk_config(), 4, tmp_path / "run")
        assert [r.iteration for r in manifest.reports] == [1, 2, 3, 4]
        csv_lines = (tmp_path / "run" / "accuracy.csv").read_text().splitlines()
        assert csv_lines[0] == "iteration,eval_accuracy"
        assert len(csv_lines) == 5
        manifest_file = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest_file["failure"] is None
        assert len(manifest_file["reports"]) == 4

    def test_end_to_end_determinism(self, tmp_path):
        first = run_evolution(desk_config(seed=3), 3, tmp_path / "a")
        second = run_evolution(desk_config(seed=3), 3, tmp_path / "b")
        assert [r.eval_accuracy for r in first.reports] == \
            [r.eval_accuracy for r in second.reports]
        assert (tmp_path / "a" / "accuracy.csv").read_bytes() == \
            (tmp_path / "b" / "accuracy.csv").read_bytes()

    def test_no_cross_iteration_hash_reuse(self, tmp_path):
        run_evolution(desk_config(), 4, tmp_path / "run")
        seen = []
        for i in range(1, 5):
            with open(tmp_path / "run" / f"iter_{i}" / "selected.jsonl") as fh:
                seen += [json.loads(line)["traj_hash"] for line in fh]
        assert len(seen) == len(set(seen))

    def test_accuracy_improves(self, tmp_path):
        manifest = run_evolution(desk_config(), 4, tmp_path / "run")
        assert manifest.baseline_accuracy == 0.0
        assert manifest.reports[-1].eval_accuracy >= 0.5

    def test_eval_split_never_sampled_or_trained(self, tmp_path, instructions_by_id):
        run_evolution(desk_config(), 2, tmp_path / "run")
        for i in (1, 2):
            for name in ("trajectories.jsonl", "selected.jsonl"):
                with open(tmp_path / "run" / f"iter_{i}" / name) as fh:
                    for line in fh:
                        instr_id = json.loads(line)["instruction_id"]
                        assert instructions_by_id[instr_id].split == "train"

    def test_hermetic_run_never_touches_the_network(self, tmp_path, monkeypatch):
        import requests

        def refuse(*args, **kwargs):
            raise AssertionError("network access attempted during a hermetic run")

        monkeypatch.setattr(requests.Session, "post", refuse)
        monkeypatch.setattr(requests.Session, "get", refuse)
        manifest = run_evolution(desk_config(), 2, tmp_path / "run")
        assert len(manifest.reports) == 2

    def test_failure_recorded_in_manifest(self, tmp_path, monkeypatch):
        from evoloop.loop import driver

        def boom(state, iteration):
            raise RuntimeError("injected")

        monkeypatch.setattr(driver, "stage_select", boom)
        with pytest.raises(StageFailure, match="select"):
            run_evolution(desk_config(), 2, tmp_path / "run")
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["failure"]["stage"] == "select"
        assert manifest["failure"]["iteration"] == 1
        assert manifest["reports"] == []
