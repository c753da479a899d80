import json

import pytest
from click.testing import CliRunner

from sft_adapter.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestConvertCommand:
    def test_fixture_export_reports_zero(self, runner, fixture_export, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, ["convert", "--dataset", str(fixture_export),
                                      "--report", str(report_path)])
        assert result.exit_code == 0, result.output
        assert "coverage discrepancies: 0" in result.output
        assert json.loads(report_path.read_text())["n_discrepancies"] == 0

    def test_malformed_dataset_exit_2(self, runner, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{oops}\n")
        result = runner.invoke(main, ["convert", "--dataset", str(bad)])
        assert result.exit_code == 2


class TestTrainCommand:
    def test_trains_and_writes_artifacts(self, runner, fixture_export, tmp_path):
        out = tmp_path / "ckpt"
        result = runner.invoke(main, ["train", "--dataset", str(fixture_export),
                                      "--out-dir", str(out),
                                      "--epochs", "1", "--batch-size", "8"])
        assert result.exit_code == 0, result.output
        assert (out / "model.pt").exists()
        assert (out / "loss_curve.csv").exists()
        assert "lr 5e-05 -> 5e-06" in result.output

    def test_zero_supervision_fails(self, runner, tmp_path):
        dataset = tmp_path / "d.jsonl"
        dataset.write_text(json.dumps({
            "source": "general_chat", "text": "USER: hi\nASSISTANT: yo",
            "mask_spans": [], "origin_hash": "c", "iteration": 0}) + "\n")
        result = runner.invoke(main, ["train", "--dataset", str(dataset),
                                      "--out-dir", str(tmp_path / "ckpt")])
        assert result.exit_code == 1
        assert "zero supervised" in result.output
