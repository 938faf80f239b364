"""Classification metrics: accuracy, per-class precision/recall/F1, macro-F1."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EvalReport:
    accuracy: float
    macro_f1: float
    per_class_precision: list[float]
    per_class_recall: list[float]
    per_class_f1: list[float]
    confusion: np.ndarray  # [C, C], rows = actual, columns = predicted
    runtime_seconds: float = 0.0
    classes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class_precision": self.per_class_precision,
            "per_class_recall": self.per_class_recall,
            "per_class_f1": self.per_class_f1,
            "confusion": self.confusion.tolist(),
            "runtime_seconds": self.runtime_seconds,
            "classes": self.classes,
        }


def confusion_matrix(actual: np.ndarray, predicted: np.ndarray, n_classes: int) -> np.ndarray:
    m = np.zeros((n_classes, n_classes), dtype=np.int64)
    for a, p in zip(actual, predicted):
        m[a, p] += 1
    return m


def report_from_predictions(
    actual: np.ndarray,
    predicted: np.ndarray,
    n_classes: int,
    classes: list[str] | None = None,
    runtime_seconds: float = 0.0,
) -> EvalReport:
    """Accuracy = trace/total; macro-F1 = unweighted mean of per-class F1.

    A class with no true and no predicted samples contributes F1 = 0.
    """
    if len(actual) == 0:
        raise ValueError("cannot evaluate an empty split")
    m = confusion_matrix(actual, predicted, n_classes)
    tp = np.diag(m).astype(np.float64)
    support = m.sum(axis=1).astype(np.float64)
    predicted_count = m.sum(axis=0).astype(np.float64)
    precision = np.divide(tp, predicted_count, out=np.zeros(n_classes), where=predicted_count > 0)
    recall = np.divide(tp, support, out=np.zeros(n_classes), where=support > 0)
    pr = precision + recall
    f1 = np.divide(2 * precision * recall, pr, out=np.zeros(n_classes), where=pr > 0)
    return EvalReport(
        accuracy=float(tp.sum() / m.sum()),
        macro_f1=float(f1.mean()),
        per_class_precision=[float(v) for v in precision],
        per_class_recall=[float(v) for v in recall],
        per_class_f1=[float(v) for v in f1],
        confusion=m,
        runtime_seconds=runtime_seconds,
        classes=list(classes) if classes else [],
    )


def cohens_d(a, b) -> float:
    """Pooled-variance standardized mean difference between two run series."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("Cohen's d needs at least 2 runs per series")
    var_a = a.var(ddof=1)
    var_b = b.var(ddof=1)
    pooled = ((a.size - 1) * var_a + (b.size - 1) * var_b) / (a.size + b.size - 2)
    if pooled <= 0:
        raise ValueError("zero pooled variance: effect size undefined")
    return float((a.mean() - b.mean()) / np.sqrt(pooled))
