"""Classification losses."""

from __future__ import annotations

import numpy as np

from . import ops
from .tensor import Tensor

PT_FLOOR = 1e-12


def focal_loss(probs: Tensor, target, gamma: float = 2.0, alpha: float = 0.25) -> Tensor:
    """Focal reweighting of cross-entropy: -alpha * (1 - p_t)^gamma * log(p_t).

    ``probs`` is a distribution [C] with an int target, or [B, C] with [B]
    targets (mean over the batch). p_t is clamped to [1e-12, 1]; gamma = 0,
    alpha = 1 reduces to plain categorical cross-entropy.
    """
    p_t = ops.clip(ops.gather_classes(probs, target), PT_FLOOR, 1.0)
    one = Tensor(np.ones_like(p_t.data))
    weight = ops.powc(one - p_t, gamma)
    per_sample = ops.mul(weight, ops.log(p_t))
    scaled = ops.mul(Tensor(np.full_like(per_sample.data, -alpha)), per_sample)
    return ops.mean_all(scaled)


def cross_entropy(probs: Tensor, target) -> Tensor:
    """-log p_t; the gamma = 0, alpha = 1 focal case, kept for readability."""
    return focal_loss(probs, target, gamma=0.0, alpha=1.0)
