"""Tests for the command line: dispatch, outputs and exit codes."""

import json
import os

import pytest

from stuq import handlers
from stuq.core.errors import DivergenceError
from stuq.main import build_parser, main

PRESET = """\
DATA_GENERATOR=graph-diffusion
DATA_NODES=3
DATA_STEPS=80
DATA_HISTORY=3
DATA_HORIZON=2
MODEL_HIDDEN=4
TRAIN_EPOCHS=2
TRAIN_PATIENCE=2
TRAIN_BATCH=16
DROPOUT_PASSES=3
RUN_SEEDS=0,1
"""


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for key in list(os.environ):
        if key.startswith("STUQ_") or key.startswith("RESULTS_MONGODB"):
            monkeypatch.delenv(key)
    (tmp_path / "small.env").write_text(PRESET)
    return tmp_path


class TestParser:
    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_method(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run", "--method", "laplace"])

    def test_plot_kind_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["plot-data", "runs/x", "--out", "x.csv"])


class TestCommands:
    def test_run_writes_record(self, workspace, capsys):
        assert main(["run", "--config", "small.env", "--method", "mis", "--out", "runs"]) == 0
        records = list((workspace / "runs").glob("*/record.json"))
        assert len(records) == 1
        assert json.loads(records[0].read_text())["method"] == "mis"
        assert "coverage" in capsys.readouterr().out

    def test_environment_sets_method(self, workspace, monkeypatch):
        monkeypatch.setenv("STUQ_METHOD_TAG", "quantile")
        assert main(["run", "--config", "small.env", "--out", "runs"]) == 0
        assert [p.parent.name.split("-s")[0] for p in (workspace / "runs").glob("*/record.json")] == ["quantile"]

    def test_train_checkpoints(self, workspace):
        assert main(["train", "--config", "small.env", "--out", "runs"]) == 0
        assert len(list((workspace / "runs").glob("point-*/checkpoint/model.json"))) == 1

    def test_synth(self, workspace):
        assert main(["synth", "--config", "small.env", "--out", "data"]) == 0
        assert (workspace / "data" / "ground_truth.json").is_file()

    def test_sweep_then_plot(self, workspace, capsys):
        args = ["sweep", "--config", "small.env", "--method", "mc-dropout", "--samples", "2,3", "--out", "runs"]
        assert main(args) == 0
        assert "seeds improve from S=2 to S=3" in capsys.readouterr().out
        table = next((workspace / "runs").glob("sweep-*"))
        assert main(["plot-data", str(table), "--kind", "sweep", "--out", "sweep.csv"]) == 0
        assert (workspace / "sweep.csv").read_text().splitlines()[0] == "samples,seed,mis"

    def test_forecast_band(self, workspace):
        main(["run", "--config", "small.env", "--out", "runs"])
        run_dir = next((workspace / "runs").iterdir())
        assert main(["plot-data", str(run_dir), "--kind", "forecast-band", "--out", "band.csv"]) == 0
        assert len((workspace / "band.csv").read_text().splitlines()) == 1 + 2 * 3

    def test_oracle(self, workspace, capsys):
        assert main(["oracle", "interval"]) == 0
        assert "interval" in capsys.readouterr().out


class TestExitCodes:
    def test_missing_preset(self, workspace):
        assert main(["run", "--config", "absent.env"]) == 1

    def test_unknown_oracle_suite(self, workspace):
        assert main(["oracle", "bogus"]) == 1

    def test_synth_needs_generator(self, workspace):
        (workspace / "csv.env").write_text("DATA_PATH=series.csv\n")
        assert main(["synth", "--config", "csv.env"]) == 1

    def test_plot_data_missing_run(self, workspace):
        assert main(["plot-data", "nowhere", "--kind", "coverage-vs-width", "--out", "c.csv"]) == 1

    def test_divergence(self, workspace, monkeypatch):
        def diverge(config, store=None, **kwargs):
            raise DivergenceError("loss is NaN at step 3")

        monkeypatch.setattr(handlers, "run_experiment", diverge)
        assert main(["run", "--config", "small.env", "--out", "runs"]) == 2
        assert not (workspace / "runs").exists()
