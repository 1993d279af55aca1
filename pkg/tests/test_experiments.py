"""Experiment harnesses, report files, figures, and the CLI."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from brownian_lstm.data import PriceSeries, TabularDataset
from brownian_lstm.experiments import (CLASSIFICATION_HEADER,
                                       REGRESSION_HEADER, ConfigError,
                                       ExperimentConfig, ExperimentReport,
                                       emit_paths_figure, parse_synth_spec,
                                       run_classification, run_comparison,
                                       run_sensitivity)
from brownian_lstm.training import TrainConfig

FAST_TRAIN = dict(max_epochs=2, batch_size=32)


def _fast_regression_config(tmp_path, **overrides):
    kw = dict(synth="sine:3,140", lookback=8, hidden_dim=6, seeds=(1,),
              m_values=(5,), out_dir=str(tmp_path),
              train=TrainConfig(**FAST_TRAIN))
    kw.update(overrides)
    return ExperimentConfig(**kw)


def _fast_classification_config(tmp_path, **overrides):
    kw = dict(synth="tab:7,80,3", hidden_dim=6, seeds=(1,), m_values=(5,),
              out_dir=str(tmp_path), train=TrainConfig(**FAST_TRAIN))
    kw.update(overrides)
    return ExperimentConfig(**kw)


class TestParseSynthSpec:
    def test_gbm(self):
        series = parse_synth_spec("gbm:7,50")
        assert isinstance(series, PriceSeries)
        assert series.values.size == 50
        assert series.name == "gbm-7"

    def test_gbm_with_overrides(self):
        series = parse_synth_spec("gbm:1,10,50,0.1,0")
        assert series.values[0] == 50.0

    def test_sine(self):
        series = parse_synth_spec("sine:5,30")
        assert isinstance(series, PriceSeries)
        assert series.name == "sine-trend-5"

    def test_tab(self):
        ds = parse_synth_spec("tab:9,40,3")
        assert isinstance(ds, TabularDataset)
        assert ds.features.shape == (40, 3)

    def test_tab_custom_rate(self):
        ds = parse_synth_spec("tab:9,40,3,0.5")
        assert ds.labels.sum() == 20

    def test_missing_colon(self):
        with pytest.raises(ConfigError, match="scheme:arg"):
            parse_synth_spec("gbm")

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError, match="unknown synth scheme"):
            parse_synth_spec("ou:1,2")

    def test_non_numeric_args(self):
        with pytest.raises(ConfigError, match="non-numeric"):
            parse_synth_spec("gbm:one,2")

    def test_wrong_arity(self):
        with pytest.raises(ConfigError):
            parse_synth_spec("gbm:7")
        with pytest.raises(ConfigError):
            parse_synth_spec("tab:7,50")


class TestExperimentConfig:
    def test_rejects_both_sources(self):
        with pytest.raises(ConfigError, match="not both"):
            ExperimentConfig(data_path="x.csv", synth="gbm:1,10")

    def test_rejects_bad_split(self):
        with pytest.raises(ConfigError, match="split"):
            ExperimentConfig(synth="gbm:1,10", split=1.5)

    def test_rejects_bad_alpha_string(self):
        with pytest.raises(ConfigError, match="alphas"):
            ExperimentConfig(synth="gbm:1,10", alphas="auto")

    def test_rejects_empty_seeds(self):
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig(synth="gbm:1,10", seeds=())

    def test_unknown_activation_fails_at_run(self, tmp_path):
        config = _fast_regression_config(tmp_path, activations=("swish",))
        with pytest.raises(ValueError, match="unknown activation"):
            run_comparison(config)


class TestReportFormat:
    def test_header_constants(self):
        assert REGRESSION_HEADER == (
            "Dataset", "Seed", "Activation Function", "M", "Alpha", "MSE",
            "R2(Train)", "R2(Test)", "Epoch of convergence")
        assert CLASSIFICATION_HEADER == (
            "Dataset", "Seed", "Activation Function", "Alpha", "Accuracy",
            "Precision", "Recall", "F1-score", "ROC-AUC")

    def test_csv_cell_formatting(self, tmp_path):
        report = ExperimentReport(
            kind="regression", header=("A", "B", "C", "D"),
            rows=[["name", 3, None, 0.123456789]])
        path = tmp_path / "r.csv"
        report.to_csv(str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "A,B,C,D"
        assert lines[1] == "name,3,,0.123457"

    def test_json_is_lossless(self, tmp_path):
        rows = [["name", 3, None, 0.123456789123]]
        report = ExperimentReport(kind="regression",
                                  header=("A", "B", "C", "D"), rows=rows)
        path = tmp_path / "r.json"
        report.to_json(str(path))
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1
        assert doc["kind"] == "regression"
        assert doc["header"] == ["A", "B", "C", "D"]
        assert doc["rows"] == [["name", 3, None, 0.123456789123]]

    def test_write_emits_both_files(self, tmp_path):
        report = ExperimentReport(kind="regression", header=("A",),
                                  rows=[[1.0]])
        csv_path, json_path = report.write(str(tmp_path), "out")
        assert os.path.exists(csv_path) and csv_path.endswith("out.csv")
        assert os.path.exists(json_path) and json_path.endswith("out.json")

    def test_column_accessor(self):
        report = ExperimentReport(kind="x", header=("A", "B"),
                                  rows=[[1, 2], [3, 4]])
        assert report.column("B") == [2, 4]


class TestRunComparison:
    def test_rows_and_m_column(self, tmp_path):
        config = _fast_regression_config(
            tmp_path, activations=("brownian", "relu"))
        report = run_comparison(config)
        assert report.header == REGRESSION_HEADER
        assert len(report.rows) == 2
        by_name = {row[2]: row for row in report.rows}
        assert by_name["BrownianReLU"][3] == 5
        assert by_name["BrownianReLU"][4] is not None
        assert by_name["ReLU"][3] is None
        assert by_name["ReLU"][4] is None
        for row in report.rows:
            assert row[0] == "sine-trend-3"
            assert row[1] == 1
            assert isinstance(row[8], int)

    def test_byte_identical_rerun(self, tmp_path):
        config = _fast_regression_config(
            tmp_path, activations=("brownian", "tanh"))
        run_comparison(config).write(str(tmp_path), "a")
        run_comparison(config).write(str(tmp_path), "b")
        assert (tmp_path / "a.csv").read_bytes() == \
            (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == \
            (tmp_path / "b.json").read_bytes()

    def test_fixed_alpha_is_reported_verbatim(self, tmp_path):
        config = _fast_regression_config(
            tmp_path, activations=("brownian",), alphas=(0.37,))
        report = run_comparison(config)
        assert report.rows[0][4] == 0.37


class TestRunSensitivity:
    def test_mean_rows_per_m_group(self, tmp_path):
        config = _fast_regression_config(tmp_path, activations=("brownian",),
                                         m_values=(5, 10), seeds=(1, 2))
        report = run_sensitivity(config)
        # Two seeds + one mean row per M value.
        assert len(report.rows) == 6
        seeds = report.column("Seed")
        assert seeds == [1, 2, "mean", 1, 2, "mean"]
        ms = report.column("M")
        assert ms == [5, 5, 5, 10, 10, 10]
        # Mean row averages the numeric columns of its group.
        mse = report.column("MSE")
        assert mse[2] == pytest.approx((mse[0] + mse[1]) / 2.0, rel=1e-12)

    def test_single_seed_has_no_mean_row(self, tmp_path):
        config = _fast_regression_config(tmp_path, activations=("brownian",))
        report = run_sensitivity(config)
        assert len(report.rows) == 1
        assert report.rows[0][1] == 1


class TestRunClassification:
    def test_brownian_expands_per_alpha(self, tmp_path):
        config = _fast_classification_config(
            tmp_path, activations=("brownian", "relu"), alphas=(0.1, 0.9))
        report = run_classification(config)
        assert report.header == CLASSIFICATION_HEADER
        assert len(report.rows) == 3
        assert [row[2] for row in report.rows] == [
            "BrownianReLU", "BrownianReLU", "ReLU"]
        assert report.rows[0][3] == 0.1
        assert report.rows[1][3] == 0.9
        for row in report.rows:
            for value in row[4:]:
                assert 0.0 <= value <= 1.0

    def test_learned_alpha_single_row(self, tmp_path):
        config = _fast_classification_config(
            tmp_path, activations=("brownian",), alphas="learned")
        report = run_classification(config)
        assert len(report.rows) == 1
        assert isinstance(report.rows[0][3], float)

    def test_regression_dataset_rejected(self, tmp_path):
        config = _fast_classification_config(tmp_path, synth="gbm:1,50")
        with pytest.raises(ConfigError, match="tabular"):
            run_classification(config)


class TestPathsFigure:
    def test_files_and_alpha_zero_matches_relu(self, tmp_path):
        csv_path, svg_path = emit_paths_figure(
            [0.0, 1.0], [50], x_min=-3.0, x_max=3.0, seed=7,
            out_dir=str(tmp_path), points=61)
        assert os.path.exists(svg_path)
        lines = open(csv_path).read().splitlines()
        assert lines[0] == "alpha,M,x,f"
        rows = [line.split(",") for line in lines[1:]]
        zero = [(float(x), float(f)) for a, m, x, f in rows
                if float(a) == 0.0]
        assert len(zero) == 61
        for x, f in zero:
            assert f == max(x, 0.0)

    def test_noise_magnitude_shrinks_with_m(self, tmp_path):
        csv_path, _ = emit_paths_figure(
            [1.0], [100, 10000], x_min=-4.0, x_max=0.0, seed=7,
            out_dir=str(tmp_path), points=200)
        rows = [line.split(",") for line in
                open(csv_path).read().splitlines()[1:]]
        rms = {}
        for a, m, x, f in rows:
            rms.setdefault(int(m), []).append(float(f) ** 2)
        small = np.sqrt(np.mean(rms[100]))
        large = np.sqrt(np.mean(rms[10000]))
        # Sample means over M draws scale like 1 / sqrt(M): factor 10.
        assert small / large == pytest.approx(10.0, rel=0.3)

    def test_svg_has_one_polyline_per_curve(self, tmp_path):
        _, svg_path = emit_paths_figure(
            [0.0, 0.5], [10, 20], x_min=-2.0, x_max=2.0, seed=7,
            out_dir=str(tmp_path), points=11)
        svg = open(svg_path).read()
        assert svg.count("<polyline") == 4

    def test_requires_negative_inputs(self, tmp_path):
        with pytest.raises(ValueError, match="negative"):
            emit_paths_figure([1.0], [10], x_min=0.5, x_max=2.0, seed=7,
                              out_dir=str(tmp_path))


def _run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "brownian_lstm", *args],
        capture_output=True, text=True, cwd=cwd)


class TestCli:
    def test_describe_prints_summary(self, tmp_path):
        proc = _run_cli(["describe", "--synth", "gbm:7,100"], str(tmp_path))
        assert proc.returncode == 0
        assert "dataset=gbm-7 n=100 scale=normalized mean=" in proc.stdout

    def test_describe_raw_flag(self, tmp_path):
        proc = _run_cli(["describe", "--synth", "gbm:7,100", "--raw"],
                        str(tmp_path))
        assert proc.returncode == 0
        assert "scale=raw" in proc.stdout

    def test_describe_writes_csv_when_out_given(self, tmp_path):
        proc = _run_cli(["describe", "--synth", "gbm:7,60", "--out", "rep"],
                        str(tmp_path))
        assert proc.returncode == 0
        lines = (tmp_path / "rep" / "describe.csv").read_text().splitlines()
        assert lines[0] == "Dataset,N,Scale,Mean,Variance"

    def test_missing_file_exits_2(self, tmp_path):
        proc = _run_cli(["describe", "--data", "missing.csv"], str(tmp_path))
        assert proc.returncode == 2
        assert proc.stderr.startswith("error:")

    def test_bad_synth_exits_2(self, tmp_path):
        proc = _run_cli(["describe", "--synth", "nope:1"], str(tmp_path))
        assert proc.returncode == 2

    def test_unknown_flag_exits_2(self, tmp_path):
        proc = _run_cli(["describe", "--bogus"], str(tmp_path))
        assert proc.returncode == 2

    def test_no_command_exits_2(self, tmp_path):
        proc = _run_cli([], str(tmp_path))
        assert proc.returncode == 2

    def test_train_writes_history_and_model(self, tmp_path):
        proc = _run_cli(
            ["train", "--synth", "sine:3,140", "--lookback", "8",
             "--hidden", "6", "--epochs", "2", "--activations", "relu",
             "--out", "run"], str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "run" / "history.csv").exists()
        assert (tmp_path / "run" / "model.json").exists()
        assert "test_mse=" in proc.stdout

    def test_compare_writes_report(self, tmp_path):
        proc = _run_cli(
            ["compare", "--synth", "sine:3,140", "--lookback", "8",
             "--hidden", "6", "--epochs", "2", "--m", "5",
             "--activations", "relu,tanh", "--out", "rep"], str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        lines = (tmp_path / "rep" / "comparison.csv").read_text().splitlines()
        assert lines[0] == ",".join(REGRESSION_HEADER)
        assert len(lines) == 3

    def test_paths_command(self, tmp_path):
        proc = _run_cli(
            ["paths", "--alpha", "0,1", "--m", "10", "--points", "21",
             "--out", "fig"], str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "fig" / "paths.csv").exists()
        assert (tmp_path / "fig" / "paths.svg").exists()

    def test_config_file_merge_and_flag_override(self, tmp_path):
        cfg = {"synth": "sine:3,140", "lookback": 8, "hidden": 6,
               "epochs": 2, "m": "5", "activations": "relu",
               "out": "from-config"}
        (tmp_path / "cfg.json").write_text(json.dumps(cfg))
        proc = _run_cli(["compare", "--config", "cfg.json"], str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "from-config" / "comparison.csv").exists()
        # A flag overrides the same key in the config file.
        proc = _run_cli(["compare", "--config", "cfg.json", "--out",
                         "from-flag"], str(tmp_path))
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "from-flag" / "comparison.csv").exists()
