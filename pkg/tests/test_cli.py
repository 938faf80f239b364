"""Command-line surface: files produced, exit-code contract, determinism."""

import json
import os

import numpy as np
import pytest

from deepfeat.cli import main

RF_ARGS = ["--mode", "rf", "--epochs", "2", "--seed", "3", "--selection", "last"]


def synth(tmp_path, name="ds", seed=0, spec=None):
    out = str(tmp_path / name)
    args = ["synth", "--seed", str(seed), "--out", out]
    if spec:
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        args += ["--spec", str(spec_path)]
    assert main(args) == 0
    return out


TINY_SPEC = {
    "name": "tiny",
    "length": 16,
    "per_class": 6,
    "noise_std": 0.05,
    "classes": [
        {"label": "sin", "kind": "sinusoid", "freq": 2.0},
        {"label": "trend", "kind": "linear-trend", "slope": 0.05},
    ],
}


class TestSynth:
    def test_writes_dataset(self, tmp_path, capsys):
        out = synth(tmp_path, spec=TINY_SPEC)
        assert os.path.isfile(os.path.join(out, "manifest.json"))
        assert os.path.isfile(os.path.join(out, "data.csv"))
        info = json.loads(capsys.readouterr().out)
        assert info["samples"] == 12

    def test_same_seed_identical_files(self, tmp_path):
        a = synth(tmp_path, "a", seed=9, spec=TINY_SPEC)
        b = synth(tmp_path, "b", seed=9, spec=TINY_SPEC)
        assert open(os.path.join(a, "data.csv"), "rb").read() == open(os.path.join(b, "data.csv"), "rb").read()

    def test_bad_spec_exit_2(self, tmp_path):
        bad = dict(TINY_SPEC, classes=TINY_SPEC["classes"][:1])
        spec_path = tmp_path / "bad.json"
        spec_path.write_text(json.dumps(bad))
        assert main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "x")]) == 2

    def test_does_not_mutate_input_dataset(self, tmp_path):
        out = synth(tmp_path, spec=TINY_SPEC)
        before = open(os.path.join(out, "data.csv"), "rb").read()
        assert main(["extract", "--dataset", out, "--branch", "rf", "--seed", "1", "--out", str(tmp_path / "f.csv")]) == 0
        assert open(os.path.join(out, "data.csv"), "rb").read() == before


class TestExtract:
    def test_rf_matrix_width(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        out = tmp_path / "rf.csv"
        assert main(["extract", "--dataset", ds, "--branch", "rf", "--out", str(out)]) == 0
        header = out.open().readline().rstrip("\n").split(",")
        assert len(header) == 20000
        assert header[0] == "f0" and header[-1] == "f19999"

    def test_local_matrix_width(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        out = tmp_path / "local.csv"
        assert main(["extract", "--dataset", ds, "--branch", "local", "--out", str(out)]) == 0
        assert len(out.open().readline().split(",")) == 256

    def test_global_matrix_width(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        out = tmp_path / "g.csv"
        assert main(["extract", "--dataset", ds, "--branch", "global", "--out", str(out)]) == 0
        assert len(out.open().readline().split(",")) == 128

    def test_pf_requires_weights(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        assert main(["extract", "--dataset", ds, "--branch", "pf", "--out", str(tmp_path / "x.csv")]) == 2

    def test_unknown_branch_usage_error(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        with pytest.raises(SystemExit) as e:
            main(["extract", "--dataset", ds, "--branch", "wavelet", "--out", "x.csv"])
        assert e.value.code == 2

    def test_missing_dataset_exit_2(self, tmp_path):
        assert main(["extract", "--dataset", str(tmp_path / "nope"), "--branch", "rf", "--out", str(tmp_path / "x.csv")]) == 2


class TestTrainEval:
    def test_train_then_eval(self, tmp_path, capsys):
        ds = synth(tmp_path, spec=TINY_SPEC)
        run_dir = str(tmp_path / "run")
        assert main(["train", "--dataset", ds, "--out", run_dir] + RF_ARGS) == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["mode"] == "rf"
        assert os.path.isfile(os.path.join(run_dir, "checkpoint.tsar"))
        assert os.path.isfile(os.path.join(run_dir, "checkpoint.json"))
        history = open(os.path.join(run_dir, "history.csv")).read().splitlines()
        assert history[0] == "epoch,train_loss,train_acc,test_acc,test_macro_f1,lr"
        assert len(history) == 3

        assert main(["eval", "--checkpoint", os.path.join(run_dir, "checkpoint"), "--dataset", ds]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["accuracy"] == pytest.approx(summary["test_accuracy"], abs=1e-9)
        conf = np.array(report["confusion"])
        assert conf.shape == (2, 2)
        assert conf.sum() == 2  # 6 per class: ceil(0.7*6)=5 train, 1 test each

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        ds = synth(tmp_path, spec=TINY_SPEC)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 1, "ablation_mode": "rf", "selection_policy": "last", "seed": 7}))
        run_dir = str(tmp_path / "run2")
        assert main(["train", "--dataset", ds, "--out", run_dir, "--config", str(cfg), "--epochs", "2"]) == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        history = open(os.path.join(run_dir, "history.csv")).read().splitlines()
        assert len(history) == 3  # flag override: 2 epochs
        assert summary["mode"] == "rf"

    def test_bad_mode_exit_2(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        with pytest.raises(SystemExit) as e:
            main(["train", "--dataset", ds, "--out", str(tmp_path / "o"), "--mode", "bogus"])
        assert e.value.code == 2

    def test_bad_epochs_exit_2(self, tmp_path):
        ds = synth(tmp_path, spec=TINY_SPEC)
        assert main(["train", "--dataset", ds, "--out", str(tmp_path / "o"), "--mode", "rf", "--epochs", "0"]) == 2


class TestAblateReport:
    def test_ablate_rf_only_then_report(self, tmp_path, capsys):
        ds = synth(tmp_path, spec=TINY_SPEC)
        out = str(tmp_path / "ab")
        assert main([
            "ablate", "--dataset", ds, "--out", out, "--modes", "rf", "--runs", "2",
            "--epochs", "1", "--seed", "5", "--selection", "last",
        ]) == 0
        capsys.readouterr()
        runs_csv = os.path.join(out, "runs.csv")
        assert os.path.isfile(runs_csv)
        assert os.path.isfile(os.path.join(out, "summary.csv"))
        assert os.path.isfile(os.path.join(out, "cohens_d.csv"))
        summary_lines = open(os.path.join(out, "summary.csv")).read().splitlines()
        assert len(summary_lines) == 2 and summary_lines[1].startswith("RF,")

        assert main(["report", "--runs-csv", runs_csv]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert "RF" == rep["cohens_d_accuracy"]["labels"][0]

    def test_report_identical_series_zero_d(self, tmp_path, capsys):
        runs = tmp_path / "runs.csv"
        rows = ["mode,label,run,seed,accuracy,macro_f1"]
        for mode in ("rf", "full"):
            for i in range(3):
                rows.append(f"{mode},{mode},{i},{i},{0.5 + 0.1 * i},{0.4 + 0.1 * i}")
        runs.write_text("\n".join(rows) + "\n")
        assert main(["report", "--runs-csv", str(runs)]) == 0
        rep = json.loads(capsys.readouterr().out)
        m = np.array(rep["cohens_d_accuracy"]["matrix"])
        np.testing.assert_allclose(m, np.zeros_like(m), atol=1e-12)

    def test_report_missing_file_exit_2(self, tmp_path):
        assert main(["report", "--runs-csv", str(tmp_path / "nope.csv")]) == 2

    def test_ablate_parallel_jobs(self, tmp_path, capsys):
        ds = synth(tmp_path, spec=TINY_SPEC)
        out = str(tmp_path / "abp")
        assert main([
            "ablate", "--dataset", ds, "--out", out, "--modes", "rf", "--runs", "2",
            "--epochs", "1", "--seed", "5", "--selection", "last", "--jobs", "2",
        ]) == 0
        capsys.readouterr()
        runs = open(os.path.join(out, "runs.csv")).read().splitlines()
        assert len(runs) == 3
        seeds = sorted(int(line.split(",")[3]) for line in runs[1:])
        assert seeds == [5, 6]
