"""Multi-run ablation protocol and effect-size reporting.

Each variant trains n times with derived seeds (base seed + run index) on
the same protocol split; the report carries mean and standard deviation of
accuracy and macro-F1 per variant plus pairwise Cohen's d matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset
from .llm import BpeVocab, Gpt2Weights
from .metrics import cohens_d
from .model import MODES
from .train import TrainConfig, train

MODE_LABELS = {"rf": "RF", "pf": "PF", "rf_pf": "RF & PF", "dc": "DC", "full": "Ours"}
TABLE_ORDER = ("rf", "pf", "rf_pf", "dc", "full")


@dataclass
class RunSeries:
    """Metric values across independent runs of one variant."""

    mode: str
    seeds: list[int] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)
    macro_f1: list[float] = field(default_factory=list)

    def summary(self) -> dict:
        acc = np.asarray(self.accuracy)
        f1 = np.asarray(self.macro_f1)
        return {
            "mode": self.mode,
            "label": MODE_LABELS[self.mode],
            "runs": len(self.accuracy),
            "acc_mean": float(acc.mean()),
            "acc_std": float(acc.std(ddof=1)) if acc.size > 1 else 0.0,
            "f1_mean": float(f1.mean()),
            "f1_std": float(f1.std(ddof=1)) if f1.size > 1 else 0.0,
        }


def ablation_run(
    base_config: TrainConfig,
    dataset: Dataset,
    modes=TABLE_ORDER,
    n_runs: int = 10,
    gpt2_weights: Gpt2Weights | None = None,
    vocab: BpeVocab | None = None,
    log=None,
) -> dict[str, RunSeries]:
    """Train every requested variant n_runs times; returns per-mode run series."""
    if n_runs < 2:
        raise ValueError("ablation needs at least 2 runs per mode")
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown ablation mode {mode!r}")
    results: dict[str, RunSeries] = {}
    for mode in modes:
        series = RunSeries(mode=mode)
        for run in range(n_runs):
            seed = base_config.seed + run
            cfg = replace(base_config, ablation_mode=mode, seed=seed)
            result = train(cfg, dataset, gpt2_weights=gpt2_weights, vocab=vocab, log=log and f"{log}[{mode}:{run}]")
            series.seeds.append(seed)
            series.accuracy.append(result.test_report.accuracy)
            series.macro_f1.append(result.test_report.macro_f1)
        results[mode] = series
    return results


def write_runs_csv(path: str, results: dict[str, RunSeries]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("mode,label,run,seed,accuracy,macro_f1\n")
        for mode in TABLE_ORDER:
            if mode not in results:
                continue
            s = results[mode]
            for i, seed in enumerate(s.seeds):
                fh.write(f"{mode},{MODE_LABELS[mode]},{i},{seed},{float(s.accuracy[i])!r},{float(s.macro_f1[i])!r}\n")


def write_summary_csv(path: str, results: dict[str, RunSeries]) -> None:
    """Rows in the published ablation-table order, mean +/- std per metric."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label,acc_mean,acc_std,f1_mean,f1_std,runs\n")
        for mode in TABLE_ORDER:
            if mode not in results:
                continue
            s = results[mode].summary()
            fh.write(
                f"{s['label']},{s['acc_mean']:.4f},{s['acc_std']:.4f},{s['f1_mean']:.4f},{s['f1_std']:.4f},{s['runs']}\n"
            )


def cohens_d_matrix(results: dict[str, RunSeries], metric: str = "accuracy") -> tuple[list[str], np.ndarray]:
    """Pairwise d[i, j] = d(series_i, series_j) over the table-ordered variants."""
    modes = [m for m in TABLE_ORDER if m in results]
    n = len(modes)
    matrix = np.zeros((n, n))
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            if i == j:
                continue
            matrix[i, j] = cohens_d(getattr(results[a], metric), getattr(results[b], metric))
    return [MODE_LABELS[m] for m in modes], matrix


def write_cohens_d_csv(path: str, results: dict[str, RunSeries]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for metric, tag in (("accuracy", "acc"), ("macro_f1", "f1")):
            labels, matrix = cohens_d_matrix(results, metric)
            fh.write(f"metric:{tag}," + ",".join(labels) + "\n")
            for label, row in zip(labels, matrix):
                fh.write(label + "," + ",".join(f"{v:.4f}" for v in row) + "\n")


def load_runs_csv(path: str) -> dict[str, RunSeries]:
    results: dict[str, RunSeries] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in fh:
            cells = line.rstrip("\n").split(",")
            if len(cells) < len(header):
                continue
            mode = cells[idx["mode"]]
            s = results.setdefault(mode, RunSeries(mode=mode))
            s.seeds.append(int(cells[idx["seed"]]))
            s.accuracy.append(float(cells[idx["accuracy"]]))
            s.macro_f1.append(float(cells[idx["macro_f1"]]))
    if not results:
        raise ValueError(f"{path}: no run rows")
    return results
