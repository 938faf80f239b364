"""Dataset model, on-disk format, validation and synthetic generation.

A dataset directory holds ``manifest.json`` ({"name", "classes", "length"})
and ``data.csv`` (header ``id,label,v1..vn``, UTF-8, LF). Values are written
in shortest round-trip decimal form, so save -> load is lossless. Missing
or malformed values are rejected with positioned diagnostics rather than
imputed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod


class DatasetError(Exception):
    """Validation failure with a stable machine-readable code."""

    code = "dataset-error"


class MissingFileError(DatasetError):
    code = "missing-file"


class ManifestError(DatasetError):
    code = "bad-manifest"


class UnknownLabelError(DatasetError):
    code = "unknown-label"


class LengthMismatchError(DatasetError):
    code = "length-mismatch"


class BadValueError(DatasetError):
    """Non-numeric or non-finite cell."""

    code = "bad-value"


@dataclass(frozen=True)
class Series:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise BadValueError("series must hold at least one value")
        if not np.all(np.isfinite(v)):
            raise BadValueError("series contains NaN or infinity")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


@dataclass
class Dataset:
    name: str
    classes: list[str]
    samples: list[tuple[Series, str]]
    expected_length: int | None = None
    ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        class_set = set(self.classes)
        if len(class_set) != len(self.classes):
            raise ManifestError("duplicate class names")
        present = set()
        for i, (series, label) in enumerate(self.samples):
            if label not in class_set:
                raise UnknownLabelError(f"sample {i}: label {label!r} not in manifest classes")
            if self.expected_length is not None and len(series) != self.expected_length:
                raise LengthMismatchError(
                    f"sample {i}: length {len(series)} != declared {self.expected_length}"
                )
            present.add(label)
        missing = class_set - present
        if missing and self.samples:
            raise ManifestError(f"classes with no samples: {sorted(missing)}")
        if not self.ids:
            self.ids = [str(i) for i in range(len(self.samples))]

    def __len__(self) -> int:
        return len(self.samples)

    def label_indices(self) -> np.ndarray:
        lookup = {c: i for i, c in enumerate(self.classes)}
        return np.array([lookup[label] for _, label in self.samples], dtype=np.int64)

    def values_matrix(self) -> np.ndarray:
        if self.expected_length is None:
            raise LengthMismatchError("values_matrix needs a fixed-length dataset")
        return np.stack([s.values for s, _ in self.samples])

    def content_hash(self) -> str:
        """Stable digest of the sample payload, for feature-cache keys."""
        import hashlib

        h = hashlib.sha256()
        h.update(",".join(self.classes).encode())
        for (series, label), sid in zip(self.samples, self.ids):
            h.update(sid.encode())
            h.update(label.encode())
            h.update(np.ascontiguousarray(series.values).tobytes())
        return h.hexdigest()[:16]


def load_dataset(directory: str) -> Dataset:
    manifest_path = os.path.join(directory, "manifest.json")
    csv_path = os.path.join(directory, "data.csv")
    for p in (manifest_path, csv_path):
        if not os.path.isfile(p):
            raise MissingFileError(f"missing {os.path.basename(p)} in {directory}")
    try:
        manifest = json.load(open(manifest_path, encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest.json is not valid JSON: {e}") from e
    for key in ("name", "classes", "length"):
        if key not in manifest:
            raise ManifestError(f"manifest.json missing key {key!r}")
    length = int(manifest["length"])
    classes = list(manifest["classes"])
    class_set = set(classes)

    samples: list[tuple[Series, str]] = []
    ids: list[str] = []
    with open(csv_path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        expect_header = "id,label," + ",".join(f"v{i + 1}" for i in range(length))
        if header != expect_header:
            raise ManifestError(f"data.csv header mismatch (expected {length} value columns)")
        for row_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != length + 2:
                raise LengthMismatchError(f"row {row_no}: {len(cells) - 2} values, expected {length}")
            sid, label = cells[0], cells[1]
            if label not in class_set:
                raise UnknownLabelError(f"row {row_no}: unknown label {label!r}")
            vals = np.empty(length, dtype=np.float64)
            for col, cell in enumerate(cells[2:], start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise BadValueError(f"row {row_no}, column v{col}: non-numeric {cell!r}") from None
                if not math.isfinite(v):
                    raise BadValueError(f"row {row_no}, column v{col}: non-finite value {cell!r}")
                vals[col - 1] = v
            samples.append((Series(vals), label))
            ids.append(sid)
    return Dataset(name=str(manifest["name"]), classes=classes, samples=samples, expected_length=length, ids=ids)


def save_dataset(dataset: Dataset, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    if dataset.expected_length is None:
        raise LengthMismatchError("only fixed-length datasets are saved")
    manifest = {"name": dataset.name, "classes": dataset.classes, "length": dataset.expected_length}
    with open(os.path.join(directory, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    with open(os.path.join(directory, "data.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,label," + ",".join(f"v{i + 1}" for i in range(dataset.expected_length)) + "\n")
        for (series, label), sid in zip(dataset.samples, dataset.ids):
            vals = ",".join(repr(float(v)) for v in series.values)
            fh.write(f"{sid},{label},{vals}\n")


def describe(dataset: Dataset) -> dict:
    return {
        "name": dataset.name,
        "length": dataset.expected_length,
        "samples": len(dataset),
        "classes": len(dataset.classes),
    }


# Synthetic generation: each class is one waveform family plus Gaussian
# noise. Phases stay fixed within a class (amplitude/offset jitter provides
# variety) so raw-series class centroids remain distinct.

DEFAULT_SYNTH_SPEC = {
    "name": "synth-default",
    "length": 128,
    "per_class": 50,
    "noise_std": 0.1,
    "classes": [
        {"label": "sinusoid", "kind": "sinusoid", "freq": 4.0, "amp": 1.0},
        {"label": "trend", "kind": "linear-trend", "slope": 0.02},
        {"label": "ar1", "kind": "ar1", "phi": 0.9},
        {"label": "square", "kind": "square-wave", "freq": 3.0},
    ],
}

_KINDS = ("sinusoid", "linear-trend", "ar1", "square-wave")


def synth_generate(spec: dict | None = None, seed: int = 0) -> Dataset:
    """Deterministic synthetic dataset from a class-generator spec."""
    spec = dict(DEFAULT_SYNTH_SPEC if spec is None else spec)
    classes = spec["classes"]
    if len(classes) < 2:
        raise ManifestError("synthetic spec needs at least 2 classes")
    length = int(spec.get("length", 128))
    per_class = int(spec.get("per_class", 50))
    noise_std = float(spec.get("noise_std", 0.1))
    t = np.arange(length, dtype=np.float64)

    samples: list[tuple[Series, str]] = []
    labels: list[str] = []
    for ci, cls in enumerate(classes):
        kind = cls["kind"]
        if kind not in _KINDS:
            raise ManifestError(f"unknown generator kind {kind!r}")
        stream = rngmod.stream(seed, f"synth.{ci}.{kind}")
        for _ in range(per_class):
            if kind == "sinusoid":
                amp = cls.get("amp", 1.0) * stream.uniform(0.9, 1.1)
                base = amp * np.sin(2 * np.pi * cls.get("freq", 4.0) * t / length)
            elif kind == "linear-trend":
                base = cls.get("slope", 0.02) * t + stream.uniform(-0.2, 0.2)
            elif kind == "ar1":
                phi = cls.get("phi", 0.9)
                innov = stream.normal(0.0, 0.3, size=length)
                base = np.empty(length)
                acc = 0.0
                for i in range(length):
                    acc = phi * acc + innov[i]
                    base[i] = acc
            else:  # square-wave
                amp = cls.get("amp", 1.0) * stream.uniform(0.9, 1.1)
                base = amp * np.sign(np.sin(2 * np.pi * cls.get("freq", 3.0) * t / length) + 1e-12)
            noisy = base + stream.normal(0.0, noise_std, size=length)
            samples.append((Series(noisy), cls["label"]))
            labels.append(cls["label"])

    return Dataset(
        name=str(spec.get("name", "synthetic")),
        classes=[c["label"] for c in classes],
        samples=samples,
        expected_length=length,
    )
