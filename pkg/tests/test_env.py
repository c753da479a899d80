import json

import pytest
from hypothesis import given, strategies as st

from evoloop.env import (
    Action,
    Checker,
    Instruction,
    Session,
    check_answer,
    normalize_answer,
    registry_load,
    session_step,
)
from evoloop.errors import FormatError, StateError, ValidationError
from evoloop.resources import fixture_path

DESK_APIS = ["calculator", "weather_lookup", "unit_convert", "dictionary",
             "todo_add", "todo_list"]


def make_instruction(text="Compute the value of 2+3*4 and reply with just the number.",
                     checker=None, split="train", instr_id="t-1"):
    checker = checker or Checker(kind="numeric", truth=14)
    return Instruction(id=instr_id, text=text, relevant_apis=("calculator",),
                       checker=checker, split=split)


class TestRegistryLoad:
    def test_desk_bundle_has_the_six_apis(self):
        specs = registry_load(fixture_path("apis.json"))
        assert [s.name for s in specs] == DESK_APIS

    def test_duplicate_name_rejected(self, tmp_path):
        spec = {"name": "calculator", "description": "", "params": [],
                "handler_id": "calculator"}
        path = tmp_path / "dup.json"
        path.write_text(json.dumps([spec, spec]))
        with pytest.raises(ValidationError, match="calculator"):
            registry_load(path)

    def test_empty_registry_is_valid(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        assert registry_load(path) == []

    def test_malformed_file_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('[\n{"name": "x",}\n]')
        with pytest.raises(FormatError, match="line"):
            registry_load(path)

    def test_unknown_handler_rejected(self, tmp_path):
        path = tmp_path / "bad_handler.json"
        path.write_text(json.dumps([{"name": "x", "description": "", "params": [],
                                     "handler_id": "nope"}]))
        with pytest.raises(ValidationError, match="nope"):
            registry_load(path)


class TestSessionStep:
    def test_calculator_evaluates_arithmetic(self, registry):
        # oracle: 2+3*4 evaluated independently before the build = 14
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.api_call("calculator", {"expr": "2+3*4"}))
        assert (obs.status, obs.payload) == ("ok", "14")

    def test_unknown_api_names_it_and_lists_available(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.api_call("foo", {}))
        assert obs.status == "api_error"
        assert "foo" in obs.payload
        for name in DESK_APIS:
            assert name in obs.payload

    def test_finish_marks_session_finished(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.finish("14"))
        assert session.finished
        assert obs.status == "ok"

    def test_stepping_finished_session_raises(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        session_step(session, Action.finish("14"))
        with pytest.raises(StateError):
            session_step(session, Action.finish("again"))

    def test_missing_required_arg_is_api_error(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.api_call("calculator", {}))
        assert obs.status == "api_error"
        assert "expr" in obs.payload

    def test_wrong_arg_type_is_api_error(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.api_call(
            "unit_convert", {"value": "ten", "from_unit": "km", "to_unit": "mi"}))
        assert obs.status == "api_error"
        assert "number" in obs.payload

    def test_round_cap_enforced(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=3)
        for _ in range(3):
            session_step(session, Action.api_call("todo_list", {}))
        assert session.finished
        assert len(session.steps) == 3
        with pytest.raises(StateError):
            session_step(session, Action.api_call("todo_list", {}))

    def test_parse_failure_consumes_a_round(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.invalid("gibberish output"))
        assert obs.status == "parse_error"
        assert len(session.steps) == 1
        assert not session.finished

    def test_replay_determinism(self, registry):
        actions = [
            Action.api_call("todo_add", {"item": "a"}),
            Action.api_call("todo_list", {}),
            Action.finish("done"),
        ]
        observed = []
        for _ in range(2):
            session = Session.start(make_instruction(), registry, round_cap=5)
            observed.append([session_step(session, a) for a in actions])
        assert observed[0] == observed[1]

    def test_sessions_are_isolated(self, registry):
        # interleaving two stateful sessions must match running them alone
        first = Session.start(make_instruction(instr_id="a"), registry, round_cap=5)
        second = Session.start(make_instruction(instr_id="b"), registry, round_cap=5)
        session_step(first, Action.api_call("todo_add", {"item": "x"}))
        session_step(second, Action.api_call("todo_add", {"item": "y"}))
        obs_first = session_step(first, Action.api_call("todo_list", {}))
        obs_second = session_step(second, Action.api_call("todo_list", {}))
        assert obs_first.payload == "todo list: 1. x"
        assert obs_second.payload == "todo list: 1. y"

    def test_division_by_zero_is_api_error(self, registry):
        session = Session.start(make_instruction(), registry, round_cap=5)
        obs = session_step(session, Action.api_call("calculator", {"expr": "1/0"}))
        assert obs.status == "api_error"


class TestCheckAnswer:
    def test_numeric_accepts_decimal_rendering(self):
        assert check_answer(make_instruction(), "14.0")

    def test_exact_normalizes_case_and_punctuation(self):
        instr = make_instruction(checker=Checker(kind="exact", truth="sunny"))
        assert check_answer(instr, "Sunny.")

    def test_numeric_rejects_unparsable(self):
        assert not check_answer(make_instruction(), "I don't know")

    def test_numeric_scans_last_number_in_prose(self):
        instr = make_instruction(checker=Checker(kind="numeric", truth=3))
        assert check_answer(instr, "added 'buy 2 apples'; the todo list now has 3 items")

    def test_numeric_tolerance_is_relative(self):
        instr = make_instruction(checker=Checker(kind="numeric", truth=1e6))
        assert check_answer(instr, "1000000.5")
        assert not check_answer(instr, "1000002")

    def test_substring_set_requires_all(self):
        instr = make_instruction(
            checker=Checker(kind="substring_set", truth=["short time", "lasting"]))
        assert check_answer(instr, "ephemeral: lasting for a very short time")
        assert not check_answer(instr, "lasting forever")

    @given(st.text(max_size=200))
    def test_checking_is_total(self, answer):
        for checker in (Checker(kind="numeric", truth=14),
                        Checker(kind="exact", truth="sunny"),
                        Checker(kind="substring_set", truth=["a"])):
            result = check_answer(make_instruction(checker=checker), answer)
            assert isinstance(result, bool)

    def test_normalization_rule(self):
        assert normalize_answer("  Sunny!  ") == "sunny"
        assert normalize_answer("14.") == "14"
        assert normalize_answer("a.b.") == "a.b"
