import json

import pytest
from click.testing import CliRunner

from chtwsim.cli import EXIT_IO, EXIT_MODEL, EXIT_NEGATIVE, cli

PROP3_MODEL = """\
space A { }
space B { }
cbrane c on A { init const 1; }
tbrane t on B { rate const 1; }
hcarrier h c -> t { threshold const 0; }
"""


@pytest.fixture
def runner():
    return CliRunner()


def diagnostics(result):
    """JSON diagnostic lines from stderr; loguru records are skipped."""
    found = []
    for line in result.stderr.splitlines():
        try:
            payload = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(payload, dict) and "code" in payload:
            found.append(payload)
    return found


def run_model(runner, model, out_dir, *args):
    return runner.invoke(cli, ["run", str(model), "--out", str(out_dir), *args])


class TestValidate:
    def test_valid_model(self, runner, models_dir):
        result = runner.invoke(cli, ["validate", str(models_dir / "feedback_point.chtw")])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["errors"] == []

    def test_validation_error(self, runner, write_model):
        result = runner.invoke(cli, ["validate", str(write_model(PROP3_MODEL))])
        assert result.exit_code == EXIT_MODEL
        assert [d["code"] for d in diagnostics(result)] == ["PROP3_VIOLATION"]

    def test_syntax_error_is_located(self, runner, write_model):
        result = runner.invoke(cli, ["validate", str(write_model("space X {"))])
        assert result.exit_code == EXIT_MODEL
        diagnostic = diagnostics(result)[0]
        assert diagnostic["code"] == "SYNTAX_ERROR"
        assert diagnostic["location"]["line"] == 1

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["validate", str(tmp_path / "absent.chtw")])
        assert result.exit_code == EXIT_IO
        assert diagnostics(result)[0]["code"] == "IO_ERROR"


class TestRun:
    def test_feedback_summary(self, runner, models_dir, tmp_path):
        result = run_model(runner, models_dir / "feedback_point.chtw", tmp_path, "--steps", "5")
        assert result.exit_code == 0

        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["integral_resource"] == [9.0, 10.0, 11.0, 11.0, 12.0, 12.0]
        assert summary["c_order"] == ["i", "j", "q", "g"]
        assert summary["recorded_steps"] == [0, 1, 2, 3, 4, 5]
        assert not summary["aborted"]

        lines = (tmp_path / "trace.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "step,brane,cell_index,value"
        assert len(lines) == 1 + 6 * 4
        assert "5,i,0,2" in lines

    def test_zero_steps(self, runner, models_dir, tmp_path):
        result = run_model(runner, models_dir / "blocking_gate.chtw", tmp_path, "--steps", "0")
        assert result.exit_code == 0
        rows = (tmp_path / "trace.csv").read_text(encoding="utf-8").splitlines()[1:]
        assert len(rows) == 4 * 4
        assert {row.split(",")[0] for row in rows} == {"0"}

    def test_sampling(self, runner, models_dir, tmp_path):
        result = run_model(runner, models_dir / "petri_chain.chtw", tmp_path, "--steps", "5", "--sample-every", "2")
        assert result.exit_code == 0
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["recorded_steps"] == [0, 2, 4, 5]
        rows = (tmp_path / "trace.csv").read_text(encoding="utf-8").splitlines()[1:]
        assert len(rows) == 4 * 3

    def test_reruns_are_byte_identical(self, runner, models_dir, tmp_path):
        model = models_dir / "feedback_spatial.chtw"
        assert run_model(runner, model, tmp_path / "a", "--steps", "5").exit_code == 0
        assert run_model(runner, model, tmp_path / "b", "--steps", "5").exit_code == 0
        for name in ("trace.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_negative_resource_is_reported(self, runner, models_dir, tmp_path):
        result = run_model(runner, models_dir / "overdraw.chtw", tmp_path, "--steps", "1")
        assert result.exit_code == 0
        assert [d["code"] for d in diagnostics(result)] == ["NEGATIVE_RESOURCE"]
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["brane_totals"]["shared"] == [3.0, -1.0]

    def test_strict_abort(self, runner, models_dir, tmp_path):
        result = run_model(runner, models_dir / "overdraw.chtw", tmp_path, "--steps", "3", "--strict")
        assert result.exit_code == EXIT_NEGATIVE
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["aborted"]
        assert summary["recorded_steps"] == [0, 1]

    def test_invalid_model_writes_nothing(self, runner, write_model, tmp_path):
        result = run_model(runner, write_model(PROP3_MODEL), tmp_path / "out")
        assert result.exit_code == EXIT_MODEL
        assert not (tmp_path / "out").exists()

    def test_steps_default_from_environment(self, runner, models_dir, tmp_path, monkeypatch):
        monkeypatch.setenv("CHTW_DEFAULT_STEPS", "2")
        assert run_model(runner, models_dir / "petri_chain.chtw", tmp_path).exit_code == 0
        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["recorded_steps"] == [0, 1, 2]


class TestMatrices:
    def test_feedback(self, runner, models_dir):
        result = runner.invoke(cli, ["matrices", str(models_dir / "feedback_point.chtw")])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["S_H"] == [[1, 0], [0, 1], [0, 1], [0, 0]]
        assert payload["S_W"] == [[0, 1, 0, 0], [1, 0, 0, 1]]
        assert payload["R_s"] == [[2.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 0.0]]

    def test_gate_rows_stay_zero(self, runner, models_dir, tmp_path):
        out = tmp_path / "m.json"
        result = runner.invoke(cli, ["matrices", str(models_dir / "blocking_gate.chtw"), "--out", str(out)])
        assert result.exit_code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        rows = dict(zip(payload["c_order"], payload["R_s"]))
        assert rows["inhibitor"] == [0.0]
        assert rows["catalyst"] == [0.0]
        assert rows["food"] == [{"tbrane": "eat", "carrier": "feed"}]
        assert dict(zip(payload["c_order"], payload["S_H"]))["inhibitor"] == [1]


class TestPlotData:
    def test_one_dimensional(self, runner, models_dir, tmp_path):
        assert run_model(runner, models_dir / "blocking_gate.chtw", tmp_path, "--steps", "1").exit_code == 0
        result = runner.invoke(cli, ["plotdata", str(tmp_path / "trace.csv"), "--brane", "food", "--step", "0"])
        assert result.exit_code == 0
        assert result.stdout.splitlines() == ["0.5 3", "1.5 3", "2.5 3", "3.5 3"]

    def test_two_dimensional_blocks(self, runner, models_dir, tmp_path):
        assert run_model(runner, models_dir / "feedback_spatial.chtw", tmp_path, "--steps", "1").exit_code == 0
        result = runner.invoke(cli, ["plotdata", str(tmp_path / "trace.csv"), "-b", "q", "-k", "0"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 7
        assert lines[3] == ""
        assert lines[0] == "0.5 0.5 2"
        assert lines[2] == "0.5 2.5 0.5"
        assert lines[4] == "1.5 0.5 2"

    def test_unrecorded_step(self, runner, models_dir, tmp_path):
        assert run_model(runner, models_dir / "petri_chain.chtw", tmp_path, "--steps", "1").exit_code == 0
        result = runner.invoke(cli, ["plotdata", str(tmp_path / "trace.csv"), "-b", "a", "-k", "7"])
        assert result.exit_code == EXIT_MODEL
        assert diagnostics(result)[0]["code"] == "PLOT_DATA_MISSING"

    def test_unknown_brane(self, runner, models_dir, tmp_path):
        assert run_model(runner, models_dir / "petri_chain.chtw", tmp_path, "--steps", "1").exit_code == 0
        result = runner.invoke(cli, ["plotdata", str(tmp_path / "trace.csv"), "-b", "zz", "-k", "0"])
        assert result.exit_code == EXIT_MODEL


def test_classify(runner, models_dir):
    result = runner.invoke(cli, ["classify", str(models_dir / "petri_chain.chtw")])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["topology"] == "linear"
    assert payload["feedback"] is False


def test_scenarios(runner, gallery):
    result = runner.invoke(cli, ["scenarios", "--path", str(gallery)])
    assert result.exit_code == 0
    names = [line.split("\t")[0] for line in result.stdout.splitlines()]
    assert "feedback_point" in names
    assert "overdraw" in names
