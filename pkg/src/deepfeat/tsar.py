"""TSAR flat tensor archive.

Little-endian layout: magic ``TSAR``, version u32 (1), tensor count u32,
then per tensor: name length u32, UTF-8 name, dtype code u8 (1 = float32),
rank u32, dims as u64 list, raw float32 payload. Names must be unique.
Used for transformer weights and training checkpoints.
"""

from __future__ import annotations

import struct
from typing import Mapping

import numpy as np

MAGIC = b"TSAR"
VERSION = 1
DTYPE_F32 = 1


class TsarError(Exception):
    pass


def write(path: str, tensors: Mapping[str, np.ndarray]) -> None:
    names = list(tensors.keys())
    if len(set(names)) != len(names):
        raise TsarError("duplicate tensor names")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(names)))
        for name in names:
            arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BI", DTYPE_F32, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            if arr.dtype.byteorder == ">":
                arr = arr.astype("<f4")
            fh.write(arr.tobytes())


def read(path: str) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise TsarError(f"{path}: bad magic")
        version, count = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise TsarError(f"{path}: unsupported version {version}")
        out: dict[str, np.ndarray] = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<I", fh.read(4))
            name = fh.read(nlen).decode("utf-8")
            dtype_code, rank = struct.unpack("<BI", fh.read(5))
            if dtype_code != DTYPE_F32:
                raise TsarError(f"{path}: tensor {name!r} has unknown dtype code {dtype_code}")
            dims = struct.unpack(f"<{rank}Q", fh.read(8 * rank)) if rank else ()
            n = int(np.prod(dims)) if dims else 1
            payload = fh.read(4 * n)
            if len(payload) != 4 * n:
                raise TsarError(f"{path}: truncated payload for {name!r}")
            if name in out:
                raise TsarError(f"{path}: duplicate tensor {name!r}")
            out[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
        trailing = fh.read(1)
        if trailing:
            raise TsarError(f"{path}: trailing bytes after last tensor")
    return out
