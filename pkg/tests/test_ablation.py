"""Multi-run ablation table machinery and effect-size matrices."""

import numpy as np
import pytest

from deepfeat import data
from deepfeat.ablation import (
    MODE_LABELS,
    RunSeries,
    ablation_run,
    cohens_d_matrix,
    load_runs_csv,
    write_cohens_d_csv,
    write_runs_csv,
    write_summary_csv,
)
from deepfeat.train import TrainConfig


def tiny_dataset():
    spec = {
        "name": "tiny",
        "length": 16,
        "per_class": 8,
        "noise_std": 0.05,
        "classes": [
            {"label": "sin", "kind": "sinusoid", "freq": 2.0},
            {"label": "sq", "kind": "square-wave", "freq": 2.0},
        ],
    }
    return data.synth_generate(spec, seed=1)


@pytest.fixture(scope="module")
def run_results(tmp_path_factory):
    import os

    from deepfeat.llm import BpeVocab, synthetic_gpt2_weights

    fixtures = os.path.join(os.path.dirname(__file__), "..", "fixtures", "gpt2")
    vocab = BpeVocab.load(os.path.join(fixtures, "vocab.json"), os.path.join(fixtures, "merges.txt"))
    weights = synthetic_gpt2_weights(2026)
    cfg = TrainConfig(epochs=2, seed=10, selection_policy="last", batch_size=8)
    old = os.environ.get("DEEPFEAT_CACHE_DIR")
    os.environ["DEEPFEAT_CACHE_DIR"] = str(tmp_path_factory.mktemp("flcache"))
    try:
        return ablation_run(cfg, tiny_dataset(), modes=("rf", "dc"), n_runs=2, vocab=vocab, gpt2_weights=weights)
    finally:
        if old is None:
            os.environ.pop("DEEPFEAT_CACHE_DIR", None)
        else:
            os.environ["DEEPFEAT_CACHE_DIR"] = old


def fake_results():
    rng = np.random.default_rng(0)
    out = {}
    for mode in ("rf", "pf", "rf_pf", "dc", "full"):
        base = {"rf": 0.78, "pf": 0.79, "rf_pf": 0.79, "dc": 0.77, "full": 0.90}[mode]
        out[mode] = RunSeries(
            mode=mode,
            seeds=list(range(10)),
            accuracy=list(base + rng.normal(0, 0.01, 10)),
            macro_f1=list(base - 0.05 + rng.normal(0, 0.01, 10)),
        )
    return out


class TestAblationRun:
    def test_needs_two_runs(self):
        with pytest.raises(ValueError):
            ablation_run(TrainConfig(epochs=1), tiny_dataset(), modes=("rf",), n_runs=1)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            ablation_run(TrainConfig(epochs=1), tiny_dataset(), modes=("bogus",), n_runs=2)

    def test_derived_seeds_and_shapes(self, run_results):
        for mode in ("rf", "dc"):
            s = run_results[mode]
            assert s.seeds == [10, 11]
            assert len(s.accuracy) == 2
            assert all(0.0 <= a <= 1.0 for a in s.accuracy)

    def test_summary_std_nonnegative(self, run_results):
        for s in run_results.values():
            assert s.summary()["acc_std"] >= 0.0


class TestCsvLayout:
    def test_summary_rows_in_table_order(self, tmp_path):
        p = tmp_path / "summary.csv"
        write_summary_csv(str(p), fake_results())
        lines = p.read_text().splitlines()
        assert lines[0] == "label,acc_mean,acc_std,f1_mean,f1_std,runs"
        assert [l.split(",")[0] for l in lines[1:]] == ["RF", "PF", "RF & PF", "DC", "Ours"]
        assert len(lines) == 6
        for line in lines[1:]:
            cells = line.split(",")
            assert float(cells[2]) >= 0.0 and float(cells[4]) >= 0.0

    def test_runs_round_trip(self, tmp_path):
        p = tmp_path / "runs.csv"
        results = fake_results()
        write_runs_csv(str(p), results)
        back = load_runs_csv(str(p))
        assert set(back) == set(results)
        for mode in results:
            np.testing.assert_allclose(back[mode].accuracy, results[mode].accuracy)
            assert back[mode].seeds == results[mode].seeds

    def test_cohens_d_csv(self, tmp_path):
        p = tmp_path / "d.csv"
        write_cohens_d_csv(str(p), fake_results())
        lines = p.read_text().splitlines()
        assert lines[0].startswith("metric:acc,RF,PF,")
        assert len(lines) == 2 * 6


class TestCohensDMatrix:
    def test_diagonal_zero_antisymmetric(self):
        labels, m = cohens_d_matrix(fake_results(), "accuracy")
        assert labels == ["RF", "PF", "RF & PF", "DC", "Ours"]
        np.testing.assert_array_equal(np.diag(m), np.zeros(5))
        np.testing.assert_allclose(m, -m.T, atol=1e-12)

    def test_full_vs_rf_positive_and_large(self):
        _, m = cohens_d_matrix(fake_results(), "accuracy")
        # full (row 4) vs rf (col 0): strong positive effect by construction
        assert m[4, 0] > 0.8

    def test_mode_labels(self):
        assert MODE_LABELS == {"rf": "RF", "pf": "PF", "rf_pf": "RF & PF", "dc": "DC", "full": "Ours"}
