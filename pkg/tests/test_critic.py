from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from evoloop.critic import (
    OracleCritic,
    RemoteCritic,
    evaluate_critic,
    load_labeled_file,
    render_critic_prompt,
)
from evoloop.critic.metrics import LabeledTrajectory
from evoloop.critic.scoring import parse_score_reply
from evoloop.errors import BackendError, ValidationError
from evoloop.resources import fixture_path


class FakeClient:
    def __init__(self, reply=None, error=False):
        self.reply = reply
        self.error = error

    def complete(self, messages, temperature=None):
        if self.error:
            raise BackendError("unreachable")
        return self.reply


class TestOracle:
    def test_correct_answer_scores_ten(self, registry, train_instructions, rollout):
        instr = train_instructions[0]  # truth 14
        trajectory = rollout(instr, registry, ["FINISH 14"])
        verdict = OracleCritic().score(trajectory, instr)
        assert (verdict.score, verdict.backend, verdict.parse_ok) == (10, "oracle", True)

    def test_wrong_answer_scores_two(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ["FINISH 999"])
        assert OracleCritic().score(trajectory, instr).score == 2

    def test_truncated_scores_zero(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ['CALL todo_list {}'] * 6)
        assert trajectory.status == "truncated"
        assert OracleCritic().score(trajectory, instr).score == 0

    def test_backend_error_not_scoreable(self, registry, train_instructions, rollout):
        import dataclasses
        instr = train_instructions[0]
        trajectory = dataclasses.replace(rollout(instr, registry, ["FINISH 14"]),
                                         status="backend_error")
        with pytest.raises(ValidationError):
            OracleCritic().score(trajectory, instr)


class TestRemote:
    def test_parses_score_line(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ["FINISH 14"])
        critic = RemoteCritic(FakeClient("The agent did well. SCORE: 8 because it checked."))
        verdict = critic.score(trajectory, instr)
        assert (verdict.score, verdict.parse_ok) == (8, True)

    def test_unparseable_reply_scores_zero(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ["FINISH 14"])
        verdict = RemoteCritic(FakeClient("great job!")).score(trajectory, instr)
        assert (verdict.score, verdict.parse_ok) == (0, False)

    def test_transport_failure_scores_zero(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ["FINISH 14"])
        verdict = RemoteCritic(FakeClient(error=True)).score(trajectory, instr)
        assert (verdict.score, verdict.parse_ok) == (0, False)
        assert "failed" in verdict.rationale

    def test_out_of_range_score_is_parse_failure(self):
        assert parse_score_reply("SCORE: 99") == (0, False)
        assert parse_score_reply("SCORE: 99\nSCORE: 7") == (7, True)


class TestCriticPrompt:
    def test_deterministic_and_contains_score_marker(self, registry, train_instructions,
                                                     rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry, ["FINISH 14"])
        first = render_critic_prompt(instr, trajectory)
        assert first == render_critic_prompt(instr, trajectory)
        assert "SCORE:" in first
        assert instr.text in first

    def test_one_block_per_step(self, registry, train_instructions, rollout):
        instr = train_instructions[0]
        trajectory = rollout(instr, registry,
                             ['CALL todo_list {}', 'CALL todo_list {}', "FINISH x"])
        prompt = render_critic_prompt(instr, trajectory)
        assert prompt.count("STEP ") == 3


class TestEvaluateCritic:
    def test_bundled_fixture_metrics(self):
        labeled = load_labeled_file(fixture_path("critic_labels_calibration.jsonl"))
        result = evaluate_critic(labeled)
        counts = result.counts
        assert (counts.tp, counts.fn, counts.fp, counts.tn) == (35, 1, 15, 49)
        assert result.precision == Fraction(35, 50)
        assert result.recall == Fraction(35, 36)
        assert abs(result.precision_percent - 70.00) < 0.01
        assert abs(result.recall_percent - 97.22) < 0.01

    def test_perfect_classifier(self):
        labeled = [LabeledTrajectory(f"{i:x}", "success", "success") for i in range(5)]
        labeled += [LabeledTrajectory(f"f{i:x}", "fail", "fail") for i in range(5)]
        result = evaluate_critic(labeled)
        assert result.precision == 1
        assert result.recall == 1

    def test_zero_predicted_positives_precision_undefined(self):
        labeled = [LabeledTrajectory(f"{i:x}", "success", "fail") for i in range(5)]
        result = evaluate_critic(labeled)
        assert result.precision is None
        assert result.recall == 0

    @given(st.lists(st.tuples(st.sampled_from(["success", "fail"]),
                              st.sampled_from(["success", "fail"])),
                    min_size=1, max_size=60))
    def test_metric_identity_against_brute_force(self, labels):
        labeled = [LabeledTrajectory(f"{i:04x}", h, c) for i, (h, c) in enumerate(labels)]
        result = evaluate_critic(labeled)
        tp = sum(h == "success" and c == "success" for h, c in labels)
        fp = sum(h == "fail" and c == "success" for h, c in labels)
        fn = sum(h == "success" and c == "fail" for h, c in labels)
        assert result.precision == (Fraction(tp, tp + fp) if tp + fp else None)
        assert result.recall == (Fraction(tp, tp + fn) if tp + fn else None)
        total = result.counts.tp + result.counts.fp + result.counts.fn + result.counts.tn
        assert total == len(labels)
