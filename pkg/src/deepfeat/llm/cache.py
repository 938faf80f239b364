"""On-disk cache for pooled language-model features.

Binary layout: magic ``FLC1``, u32 row count, u32 dim, then row-major
little-endian float32. One file per (dataset content hash, serialization
config); the frozen branch never changes during training so rows are
computed once per dataset. ``DEEPFEAT_CACHE_DIR`` overrides the location.
"""

from __future__ import annotations

import os
import struct
import sys

import numpy as np

MAGIC = b"FLC1"
ENV_CACHE_DIR = "DEEPFEAT_CACHE_DIR"


class CacheError(Exception):
    pass


def cache_dir() -> str:
    override = os.environ.get(ENV_CACHE_DIR)
    if override:
        return override
    return os.path.join(os.path.expanduser("~"), ".cache", "deepfeat")


def cache_path(dataset_hash: str, fractional_digits: int, separator: str, weights_tag: str) -> str:
    sep_tag = separator.encode("utf-8").hex()
    return os.path.join(cache_dir(), f"flc_{dataset_hash}_{fractional_digits}_{sep_tag}_{weights_tag}.bin")


def write_rows(path: str, rows: np.ndarray) -> None:
    rows = np.ascontiguousarray(rows, dtype=np.float32)
    if rows.ndim != 2:
        raise CacheError("feature cache expects a 2-D matrix")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", rows.shape[0], rows.shape[1]))
        fh.write(rows.astype("<f4").tobytes())
    os.replace(tmp, path)


def read_rows(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CacheError(f"{path}: bad magic")
        count, dim = struct.unpack("<II", fh.read(8))
        payload = fh.read(4 * count * dim)
        if len(payload) != 4 * count * dim:
            raise CacheError(f"{path}: truncated")
    return np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()


def get_or_compute(path: str, compute, expected_rows: int, log=None) -> np.ndarray:
    """Read the cache if present and well-shaped, else compute and persist."""
    if os.path.isfile(path):
        try:
            rows = read_rows(path)
            if rows.shape[0] == expected_rows:
                return rows
        except CacheError:
            pass
    if log:
        print(log, file=sys.stderr)
    rows = compute()
    write_rows(path, rows)
    return rows
