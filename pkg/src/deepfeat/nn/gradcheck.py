"""Finite-difference verification of analytic gradients.

Runs in float64: central differences (f(x+h) - f(x-h)) / 2h per coordinate,
compared against one reverse-mode pass. Large tensors can be spot-checked on
a seeded random subset of coordinates to keep composed-model checks fast.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


def grad_check(
    f: Callable[[], Tensor],
    wrt: Sequence[Tensor],
    h: float = 1e-5,
    max_coords: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Return the max relative error between analytic and numeric gradients.

    ``f`` must rebuild its graph on every call (it is invoked 2 per checked
    coordinate plus once for the analytic pass) and return a scalar Tensor.
    ``wrt`` lists the leaf tensors to differentiate; they must be float64.
    """
    for t in wrt:
        if t.data.dtype != np.float64:
            raise ValueError("grad_check requires float64 tensors")
        t.grad = None
    out = f()
    out.backward()
    analytic = [np.array(t.grad) if t.grad is not None else np.zeros_like(t.data) for t in wrt]

    worst = 0.0
    for t, a in zip(wrt, analytic):
        flat = t.data.reshape(-1)
        n = flat.size
        if max_coords is not None and n > max_coords:
            if rng is None:
                rng = np.random.default_rng(0)
            coords = rng.choice(n, size=max_coords, replace=False)
        else:
            coords = np.arange(n)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            f_plus = f().item()
            flat[i] = orig - h
            f_minus = f().item()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * h)
            ana = a.reshape(-1)[i]
            err = abs(ana - numeric) / max(abs(ana), abs(numeric), 1e-8)
            worst = max(worst, err)
    return worst
