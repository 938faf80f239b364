"""Training loop, protocol splitting, and evaluation.

Per epoch, shuffled mini-batches flow through the active branches, the
fusion stage and the classifier; focal loss gradients drive Adam under the
staircase inverse-time-decay schedule. Randomized and language-model
features are computed once per dataset and looked up per batch. After each
epoch the test split (and validation split, when used) is scored in eval
mode, and the checkpoint chosen by the selection policy is retained.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import metrics as metricsmod
from . import rng as rngmod
from . import rocket
from .data import Dataset
from .llm import (
    BpeVocab,
    Gpt2Weights,
    SerializationConfig,
    llm_features_matrix,
    synthetic_gpt2_weights,
)
from .llm import cache as flcache
from .model import MODES, DeepFeatModel, build_model
from .nn import Adam, DivergenceError, LrSchedule, Tensor, focal_loss

PROTOCOL_SPLIT_SEED = 100
PROTOCOL_TRAIN_RATIO = 0.7
SELECTION_POLICIES = ("val_best", "test_best", "last")


@dataclass
class TrainConfig:
    epochs: int = 200
    lr0: float = 0.001
    decay_steps: int = 100
    decay_rate: float = 0.5
    batch_size: int = 16
    focal_gamma: float = 2.0
    focal_alpha: float = 0.25
    seed: int = 0
    ablation_mode: str = "full"
    selection_policy: str = "val_best"
    val_fraction: float = 0.15
    dataset_dir: str | None = None
    output_dir: str | None = None
    fractional_digits: int = 3
    separator: str = ", "
    gpt2_weights_path: str | None = None
    gpt2_weights_seed: int = 2026
    finetune_llm: bool = False  # stub: the transformer branch is frozen

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.ablation_mode not in MODES:
            raise ValueError(f"ablation_mode must be one of {MODES}")
        if self.selection_policy not in SELECTION_POLICIES:
            raise ValueError(f"selection_policy must be one of {SELECTION_POLICIES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.finetune_llm:
            raise ValueError("fine-tuning the language model is not supported; the branch is frozen")

    def serialization(self) -> SerializationConfig:
        return SerializationConfig(fractional_digits=self.fractional_digits, separator=self.separator)


def stratified_split(
    dataset: Dataset, ratio: float = PROTOCOL_TRAIN_RATIO, seed: int = PROTOCOL_SPLIT_SEED
) -> tuple[np.ndarray, np.ndarray]:
    """Per class: seeded shuffle, first ceil(ratio * n) to train. Disjoint, exhaustive."""
    labels = dataset.label_indices()
    gen = np.random.Generator(np.random.PCG64(seed))
    train_parts, test_parts = [], []
    for c in range(len(dataset.classes)):
        idx = np.flatnonzero(labels == c)
        if idx.size < 2:
            raise ValueError(f"class {dataset.classes[c]!r} has fewer than 2 samples")
        perm = idx[gen.permutation(idx.size)]
        take = math.ceil(ratio * idx.size)
        train_parts.append(perm[:take])
        test_parts.append(perm[take:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def carve_validation(
    train_idx: np.ndarray, labels: np.ndarray, fraction: float, seed: int = PROTOCOL_SPLIT_SEED
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified validation subset of the training indices."""
    gen = np.random.Generator(np.random.PCG64(seed + 1))
    fit_parts, val_parts = [], []
    for c in np.unique(labels[train_idx]):
        idx = train_idx[labels[train_idx] == c]
        perm = idx[gen.permutation(idx.size)]
        take = max(1, math.ceil(fraction * idx.size))
        val_parts.append(perm[:take])
        fit_parts.append(perm[take:])
    return np.sort(np.concatenate(fit_parts)), np.sort(np.concatenate(val_parts))


@dataclass
class FeatureBundle:
    """Per-sample feature rows shared by training and evaluation."""

    series: np.ndarray | None = None  # [N, T, 1] float32
    fr: np.ndarray | None = None  # [N, 20000] float32
    fl: np.ndarray | None = None  # [N, 768] float32


def prepare_features(
    dataset: Dataset,
    config: TrainConfig,
    gpt2_weights: Gpt2Weights | None = None,
    vocab: BpeVocab | None = None,
    log=None,
) -> FeatureBundle:
    active = set(build_mode_branches(config.ablation_mode))
    bundle = FeatureBundle()
    if "g" in active:
        bundle.series = dataset.values_matrix().astype(np.float32)[:, :, None]
    if "r" in active:
        bank = rocket.generate_bank(config.seed)
        rows = rocket.extract_matrix([s.values for s, _ in dataset.samples], bank)
        bundle.fr = rows.astype(np.float32)
    if "l" in active:
        if vocab is None:
            raise ValueError("language-model branch needs a vocabulary")
        weights = gpt2_weights
        tag = None
        if weights is None:
            if config.gpt2_weights_path:
                weights = Gpt2Weights.from_tsar(config.gpt2_weights_path)
                tag = "file" + _file_tag(config.gpt2_weights_path)
            else:
                weights = synthetic_gpt2_weights(config.gpt2_weights_seed)
                tag = f"synth{config.gpt2_weights_seed}"
        else:
            tag = "mem"
        path = flcache.cache_path(dataset.content_hash(), config.fractional_digits, config.separator, tag)
        bundle.fl = flcache.get_or_compute(
            path,
            lambda: llm_features_matrix(
                [s.values for s, _ in dataset.samples], config.serialization(), vocab, weights
            ),
            expected_rows=len(dataset),
            log=log and f"{log} computing language-model features for {len(dataset)} samples",
        )
    return bundle


def _file_tag(path: str) -> str:
    import hashlib

    h = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(1 << 20)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()[:12]


def build_mode_branches(mode: str) -> tuple[str, ...]:
    from .model import MODE_BRANCHES

    return MODE_BRANCHES[mode]


def _batch_tensors(bundle: FeatureBundle, idx: np.ndarray) -> tuple[Tensor | None, Tensor | None, Tensor | None]:
    series = Tensor(bundle.series[idx]) if bundle.series is not None else None
    fr = Tensor(bundle.fr[idx]) if bundle.fr is not None else None
    fl = Tensor(bundle.fl[idx]) if bundle.fl is not None else None
    return series, fr, fl


def predict(
    model: DeepFeatModel, bundle: FeatureBundle, idx: np.ndarray, batch_size: int = 256
) -> np.ndarray:
    """Eval-mode argmax predictions for the given sample indices."""
    preds = np.empty(idx.size, dtype=np.int64)
    for start in range(0, idx.size, batch_size):
        chunk = idx[start : start + batch_size]
        series, fr, fl = _batch_tensors(bundle, chunk)
        probs = model.forward(series, fr, fl, training=False)
        preds[start : start + chunk.size] = probs.data.argmax(axis=-1)
    return preds


def evaluate(
    model: DeepFeatModel,
    bundle: FeatureBundle,
    idx: np.ndarray,
    labels: np.ndarray,
    classes: list[str],
) -> metricsmod.EvalReport:
    t0 = time.time()
    preds = predict(model, bundle, idx)
    return metricsmod.report_from_predictions(
        labels[idx], preds, len(classes), classes=classes, runtime_seconds=time.time() - t0
    )


@dataclass
class TrainResult:
    model: DeepFeatModel
    best_tensors: dict[str, np.ndarray]
    history: list[dict]
    test_report: metricsmod.EvalReport
    config: TrainConfig
    classes: list[str]
    selected_epoch: int
    runtime_seconds: float
    splits: dict[str, np.ndarray] = field(default_factory=dict)

    def history_rows(self) -> list[dict]:
        return self.history


HISTORY_COLUMNS = ("epoch", "train_loss", "train_acc", "test_acc", "test_macro_f1", "lr")


def train(
    config: TrainConfig,
    dataset: Dataset,
    gpt2_weights: Gpt2Weights | None = None,
    vocab: BpeVocab | None = None,
    log=None,
) -> TrainResult:
    t_start = time.time()
    labels = dataset.label_indices()
    classes = dataset.classes
    train_idx, test_idx = stratified_split(dataset)
    if config.selection_policy == "val_best":
        fit_idx, val_idx = carve_validation(train_idx, labels, config.val_fraction)
    else:
        fit_idx, val_idx = train_idx, None

    bundle = prepare_features(dataset, config, gpt2_weights=gpt2_weights, vocab=vocab, log=log)
    model = build_model(config.ablation_mode, len(classes), config.seed)
    params = model.parameters()
    optimizer = Adam(
        params,
        schedule=LrSchedule(lr0=config.lr0, decay_steps=config.decay_steps, decay_rate=config.decay_rate),
    )
    shuffle_rng = rngmod.stream(config.seed, "shuffle")
    dropout_rng = rngmod.stream(config.seed, "dropout")

    best_metric = -1.0
    best_tensors = {name: arr.copy() for name, arr in model.tensors().items()}
    best_epoch = 0
    history: list[dict] = []

    for epoch in range(1, config.epochs + 1):
        order = fit_idx[shuffle_rng.permutation(fit_idx.size)]
        epoch_loss = 0.0
        correct = 0
        for start in range(0, order.size, config.batch_size):
            batch = order[start : start + config.batch_size]
            series, fr, fl = _batch_tensors(bundle, batch)
            probs = model.forward(series, fr, fl, training=True, dropout_rng=dropout_rng)
            loss = focal_loss(probs, labels[batch], gamma=config.focal_gamma, alpha=config.focal_alpha)
            if not np.isfinite(loss.item()):
                raise DivergenceError(f"non-finite loss at epoch {epoch}")
            optimizer.zero_grad()
            loss.backward()
            lr = optimizer.step()
            epoch_loss += loss.item() * batch.size
            correct += int((probs.data.argmax(axis=-1) == labels[batch]).sum())

        # one eval-mode pass covers test and validation rows
        eval_idx = test_idx if val_idx is None else np.concatenate([test_idx, val_idx])
        eval_preds = predict(model, bundle, eval_idx)
        test_report = metricsmod.report_from_predictions(
            labels[test_idx], eval_preds[: test_idx.size], len(classes), classes=classes
        )
        row = {
            "epoch": epoch,
            "train_loss": epoch_loss / order.size,
            "train_acc": correct / order.size,
            "test_acc": test_report.accuracy,
            "test_macro_f1": test_report.macro_f1,
            "lr": lr,
        }
        if config.selection_policy == "val_best":
            val_acc = float((eval_preds[test_idx.size :] == labels[val_idx]).mean())
            row["val_acc"] = val_acc
            candidate = val_acc
        elif config.selection_policy == "test_best":
            candidate = test_report.accuracy
        else:
            candidate = float(epoch)  # monotone: last epoch always wins
        history.append(row)
        if log:
            print(
                f"{log} epoch {epoch}/{config.epochs} loss {row['train_loss']:.4f} "
                f"test_acc {row['test_acc']:.4f} lr {lr:.6f}",
                flush=True,
            )
        if candidate > best_metric:
            best_metric = candidate
            best_epoch = epoch
            best_tensors = {name: arr.copy() for name, arr in model.tensors().items()}

    model.load_tensors(best_tensors)
    final_report = evaluate(model, bundle, test_idx, labels, classes)
    return TrainResult(
        model=model,
        best_tensors=best_tensors,
        history=history,
        test_report=final_report,
        config=config,
        classes=classes,
        selected_epoch=best_epoch,
        runtime_seconds=time.time() - t_start,
        splits={"train": train_idx, "test": test_idx, "fit": fit_idx, "val": val_idx if val_idx is not None else np.array([], dtype=np.int64)},
    )


def write_history_csv(path: str, history: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(HISTORY_COLUMNS) + "\n")
        for row in history:
            fh.write(",".join(repr(float(row[c])) if c != "epoch" else str(row[c]) for c in HISTORY_COLUMNS) + "\n")


def save_checkpoint(result: TrainResult, path_prefix: str) -> tuple[str, str]:
    """TSAR parameters + JSON sidecar; returns both paths."""
    import json
    import os

    from . import tsar

    tsar_path = path_prefix + ".tsar"
    meta_path = path_prefix + ".json"
    os.makedirs(os.path.dirname(os.path.abspath(tsar_path)), exist_ok=True)
    tsar.write(tsar_path, result.best_tensors)
    sidecar = {
        "config": asdict(result.config),
        "classes": result.classes,
        "mode": result.config.ablation_mode,
        "selected_epoch": result.selected_epoch,
        "test_accuracy": result.test_report.accuracy,
        "test_macro_f1": result.test_report.macro_f1,
        "runtime_seconds": result.runtime_seconds,
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return tsar_path, meta_path


def load_checkpoint(path_prefix: str) -> tuple[DeepFeatModel, dict]:
    import json

    from . import tsar

    sidecar = json.load(open(path_prefix + ".json", encoding="utf-8"))
    tensors = tsar.read(path_prefix + ".tsar")
    model = build_model(sidecar["mode"], len(sidecar["classes"]), sidecar["config"]["seed"])
    model.load_tensors(tensors)
    return model, sidecar
