"""Non-learned randomized convolutional kernel features.

A fixed bank of 10,000 kernels, each of length 9 with weights drawn from
N(0, 0.05), zero bias, dilation 4 and centered zero padding 16 (so the
convolution output keeps the input length). Each kernel contributes two
pooled statistics, the global max and the proportion of positive values,
interleaved kernel-major into a 20,000-wide feature vector.

Weight generation runs over a counter-based stream (Box-Muller on
SplitMix64), so a bank is a pure function of its seed on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .backend import use_numba

KERNEL_LENGTH = 9
DILATION = 4
NUM_KERNELS = 10_000
WEIGHT_STD = 0.05
PADDING = (KERNEL_LENGTH - 1) * DILATION // 2  # 16: same-length output


@dataclass(frozen=True)
class RandomKernel:
    weights: np.ndarray  # [9]
    dilation: int = DILATION
    bias: float = 0.0
    padding: int = PADDING


@dataclass(frozen=True)
class KernelBank:
    weights: np.ndarray  # [m, 9] float64
    seed: int

    def __len__(self) -> int:
        return self.weights.shape[0]

    def kernel(self, i: int) -> RandomKernel:
        return RandomKernel(weights=self.weights[i])


def generate_bank(seed: int, num_kernels: int = NUM_KERNELS) -> KernelBank:
    """Draw the full bank from the seed's counter stream; same seed, same bank."""
    flat = rngmod.normal(seed, 0, num_kernels * KERNEL_LENGTH, std=WEIGHT_STD)
    return KernelBank(weights=flat.reshape(num_kernels, KERNEL_LENGTH), seed=seed)


def ppv(v: np.ndarray) -> float:
    """Proportion of strictly positive values."""
    v = np.asarray(v)
    if v.size == 0:
        raise ValueError("ppv of an empty vector is undefined")
    return float((v > 0).sum() / v.size)


def _pad(series: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a nonempty 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    out = np.zeros(x.size + 2 * PADDING, dtype=np.float64)
    out[PADDING : PADDING + x.size] = x
    return out


def _extract_numpy(xpad: np.ndarray, weights: np.ndarray, t_out: int) -> np.ndarray:
    """Vectorized fallback; accumulates taps in index order (bit-equal to the scalar loop)."""
    acc = np.zeros((weights.shape[0], t_out), dtype=np.float64)
    for j in range(KERNEL_LENGTH):
        acc += weights[:, j : j + 1] * xpad[j * DILATION : j * DILATION + t_out]
    out = np.empty(2 * weights.shape[0], dtype=np.float64)
    out[0::2] = acc.max(axis=1)
    out[1::2] = (acc > 0.0).sum(axis=1) / t_out
    return out


_numba_kernel = None


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is None:
        from numba import njit, prange

        @njit(cache=True, parallel=True)
        def kernel(xpad, weights, t_out, out):  # pragma: no cover - compiled
            m = weights.shape[0]
            k = weights.shape[1]
            for i in prange(m):
                mx = -np.inf
                pos = 0
                for t in range(t_out):
                    acc = 0.0
                    for j in range(k):
                        acc += weights[i, j] * xpad[t + j * DILATION]
                    if acc > mx:
                        mx = acc
                    if acc > 0.0:
                        pos += 1
                out[2 * i] = mx
                out[2 * i + 1] = pos / t_out

        _numba_kernel = kernel
    return _numba_kernel


def extract(series: np.ndarray, bank: KernelBank) -> np.ndarray:
    """Per-series feature vector [2m]: [max_0, ppv_0, max_1, ppv_1, ...]."""
    xpad = _pad(series)
    t_out = xpad.size - 2 * PADDING  # same-length output by construction
    if use_numba():
        out = np.empty(2 * len(bank), dtype=np.float64)
        _get_numba_kernel()(xpad, bank.weights, t_out, out)
        return out
    return _extract_numpy(xpad, bank.weights, t_out)


def extract_matrix(series_list, bank: KernelBank) -> np.ndarray:
    """Stack extract() over samples -> [n, 2m]."""
    return np.stack([extract(s, bank) for s in series_list])
