import json

import pandas as pd
import pytest

from data.flight_data import load_csv
from utils.command_system import run_main

FAST_CONFIG = """\
pipeline:
  l_candidates: [2, 3]
bfa:
  population_size: 4
  chemotaxis_steps: 3
  reproduction_steps: 1
  elimination_steps: 1
generate:
  n: 40
"""


@pytest.fixture
def fast_config_file(tmp_path):
    path = tmp_path / "fast.yaml"
    path.write_text(FAST_CONFIG)
    return path


def run(capsys, *argv):
    status = run_main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return status, captured.out, captured.err


class TestGenerate:
    def test_writes_dataset(self, tmp_path, capsys):
        out = tmp_path / "data.csv"
        status, stdout, _ = run(capsys, "generate", "--n", 200, "--noise", 0.02, "--seed", 42, "--out", out)
        assert status == 0
        assert "200" in stdout
        lines = out.read_text().splitlines()
        assert lines[0] == "HR,RA,RR,BI,FT,FPI"
        assert len(lines) == 201

    def test_byte_identical(self, tmp_path, capsys):
        for name in ("a.csv", "b.csv"):
            run(capsys, "generate", "--n", 20, "--seed", 3, "--out", tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_zero_records(self, tmp_path, capsys):
        status, _, stderr = run(capsys, "generate", "--n", 0, "--out", tmp_path / "data.csv")
        assert status != 0
        assert "n must be ≥ 1" in stderr
        assert len(stderr.strip().splitlines()) == 1


class TestTrainAndEvaluate:
    def test_train_writes_model_and_report(self, tmp_path, capsys, dataset_csv, fast_config_file):
        model = tmp_path / "model.json"
        status, stdout, _ = run(capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--out", model)
        assert status == 0
        assert "chosen_L" in stdout
        report = json.loads((tmp_path / "model.report.json").read_text())
        assert report["mode"] == "bfa-elm"
        assert report["chosen_L"] in (2, 3)
        trace = report["bfa_trace"]
        assert all(later <= earlier for earlier, later in zip(trace, trace[1:]))
        assert "norm_stats" in json.loads(model.read_text())

    def test_elm_mode(self, tmp_path, capsys, dataset_csv, fast_config_file):
        report_path = tmp_path / "elm.json"
        status, _, _ = run(
            capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--mode", "elm",
            "--out", tmp_path / "model.json", "--report", report_path,
        )
        assert status == 0
        assert json.loads(report_path.read_text())["mode"] == "elm"

    def test_report_byte_identical(self, tmp_path, capsys, dataset_csv, fast_config_file):
        for name in ("a", "b"):
            run(capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--seed", 5,
                "--out", tmp_path / f"{name}.json")
        assert (tmp_path / "a.report.json").read_bytes() == (tmp_path / "b.report.json").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_evaluate_on_training_file(self, tmp_path, capsys, dataset_csv, fast_config_file):
        model = tmp_path / "model.json"
        run(capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--out", model)
        predictions = tmp_path / "predictions.csv"
        status, stdout, _ = run(capsys, "evaluate", "--model", model, "--data", dataset_csv, "--out", predictions)
        assert status == 0
        result = json.loads(stdout)
        assert result["accuracy"] <= 100.0
        assert all(result[key] >= 0 for key in ("mae", "mse", "mape"))
        frame = pd.read_csv(predictions)
        assert list(frame.columns) == ["index", "true", "predicted"]
        assert len(frame) == len(load_csv(dataset_csv))

    def test_evaluate_zero_targets(self, tmp_path, capsys, dataset_csv, fast_config_file, write_csv):
        model = tmp_path / "model.json"
        run(capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--out", model)
        zeros = write_csv("HR,RA,RR,BI,FT,FPI\n0.1,0.2,0.3,0.4,0.5,0\n0.5,0.4,0.3,0.2,0.1,0\n", "zeros.csv")
        status, _, stderr = run(capsys, "evaluate", "--model", model, "--data", zeros, "--out", tmp_path / "p.csv")
        assert status != 0
        assert "zero true value in MAPE" in stderr

    def test_train_schema_error_has_line(self, capsys, write_csv, fast_config_file):
        bad = write_csv("HR,RA,RR,BI,FT,FPI\n0.1,0.2,0.3,0.4,0.5,0.6\n0.1,x,0.3,0.4,0.5,0.6\n")
        status, _, stderr = run(capsys, "train", "--data", bad, "--config", fast_config_file)
        assert status == 1
        assert "line 3" in stderr


class TestCompare:
    def test_single_seed(self, tmp_path, capsys, dataset_csv, fast_config_file):
        out = tmp_path / "cmp"
        status, stdout, _ = run(
            capsys, "compare", "--data", dataset_csv, "--config", fast_config_file, "--seeds", 1, "--out", out
        )
        assert status == 0
        assert len(pd.read_csv(out / "comparison.csv")) == 1
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["medians"]) == {"elm", "bfa-elm"}
        assert json.loads(stdout) == summary["medians"]

    def test_resolved_config_replays(self, tmp_path, capsys, dataset_csv, fast_config_file):
        first = tmp_path / "first"
        run(capsys, "compare", "--data", dataset_csv, "--config", fast_config_file, "--seeds", 1,
            "--seed", 9, "--l-candidates", "3", "--out", first)
        saved = first / "config.yaml"
        assert saved.is_file()
        second = tmp_path / "second"
        status, _, _ = run(capsys, "compare", "--data", dataset_csv, "--config", saved, "--out", second)
        assert status == 0
        assert (first / "summary.json").read_bytes() == (second / "summary.json").read_bytes()

    def test_default_synthetic_data(self, tmp_path, capsys, fast_config_file):
        out = tmp_path / "cmp"
        status, _, _ = run(capsys, "compare", "--config", fast_config_file, "--seeds", 1, "--out", out)
        assert status == 0
        assert json.loads((out / "summary.json").read_text())["dataset_size"] == 40

    def test_missing_data_file(self, tmp_path, capsys):
        missing = tmp_path / "nowhere.csv"
        status, _, stderr = run(capsys, "compare", "--data", missing, "--out", tmp_path / "cmp")
        assert status != 0
        assert str(missing) in stderr


class TestFpi:
    def test_identical_columns(self, capsys, write_csv):
        status, stdout, _ = run(capsys, "fpi", "--trace", write_csv("h_ac,h_ex\n10,10\n12.5,12.5\n"))
        assert status == 0
        assert float(stdout) == 0.0

    def test_hand_value(self, capsys, write_csv):
        status, stdout, _ = run(capsys, "fpi", "--trace", write_csv("h_ac,h_ex\n3,0\n0,4\n"))
        assert status == 0
        assert stdout.strip().startswith("3.5355339059")

    def test_wrong_header(self, capsys, write_csv):
        status, _, stderr = run(capsys, "fpi", "--trace", write_csv("alt,exp\n1,2\n"))
        assert status != 0
        assert "h_ac,h_ex" in stderr

    def test_ragged(self, capsys, write_csv):
        status, _, _ = run(capsys, "fpi", "--trace", write_csv("h_ac,h_ex\n1,2\n3\n"))
        assert status != 0


class TestCorrelate:
    def test_fixed_order(self, capsys, dataset_csv):
        status, stdout, _ = run(capsys, "correlate", "--data", dataset_csv)
        assert status == 0
        pairs = json.loads(stdout)
        assert [name for name, _ in pairs] == ["HR", "RA", "RR", "BI", "FT"]

    def test_copied_column(self, capsys, write_csv):
        text = "HR,RA,RR,BI,FT,FPI\n0.1,0.5,0.2,0.9,0.3,0.1\n0.4,0.1,0.8,0.2,0.6,0.4\n0.8,0.7,0.4,0.5,0.1,0.8\n"
        status, stdout, _ = run(capsys, "correlate", "--data", write_csv(text))
        assert status == 0
        assert dict(json.loads(stdout))["HR"] == pytest.approx(1.0)

    def test_zero_variance_names_column(self, capsys, write_csv):
        text = "HR,RA,RR,BI,FT,FPI\n0.1,0.5,0.2,0.9,0.3,0.1\n0.4,0.5,0.8,0.2,0.6,0.4\n0.8,0.5,0.4,0.5,0.1,0.8\n"
        status, _, stderr = run(capsys, "correlate", "--data", write_csv(text))
        assert status != 0
        assert "RA" in stderr

    def test_undecodable_file_is_one_error_line(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_bytes(b"HR,RA,RR,BI,FT,FPI\n0.1,0.2,0.3,0.4,0.5,\xff\n")
        status, _, stderr = run(capsys, "correlate", "--data", path)
        assert status == 1
        assert len(stderr.strip().splitlines()) == 1
        assert "line 2" in stderr

    def test_single_record(self, capsys, write_csv):
        status, _, stderr = run(capsys, "correlate", "--data", write_csv("HR,RA,RR,BI,FT,FPI\n0.1,0.2,0.3,0.4,0.5,0.6\n"))
        assert status != 0
        assert "need ≥ 2 records" in stderr


class TestBenchmarkAndUsage:
    def test_benchmark(self, tmp_path, capsys, fast_config_file):
        out = tmp_path / "bench.json"
        status, stdout, _ = run(
            capsys, "benchmark", "--function", "sphere", "--dim", 2, "--config", fast_config_file, "--out", out
        )
        assert status == 0
        assert json.loads(stdout)["function"] == "sphere"
        assert len(json.loads(out.read_text())["best_position"]) == 2

    def test_unknown_subcommand(self, capsys):
        status, _, _ = run(capsys, "plot")
        assert status == 2

    def test_invalid_config_exits_2(self, capsys, tmp_path, dataset_csv):
        path = tmp_path / "bad.yaml"
        path.write_text("bfa:\n  population_size: 3\n")
        status, _, stderr = run(capsys, "train", "--data", dataset_csv, "--config", path)
        assert status == 2
        assert "population_size" in stderr

    def test_input_file_untouched(self, tmp_path, capsys, dataset_csv, fast_config_file):
        before = dataset_csv.read_bytes()
        run(capsys, "train", "--data", dataset_csv, "--config", fast_config_file, "--out", tmp_path / "m.json")
        assert dataset_csv.read_bytes() == before
