"""Deterministic full-architecture transformer weights for offline testing.

Real pretrained checkpoints are converted to TSAR out of band; tests and
fixtures instead generate weights procedurally so nothing large is
committed. Values come from the SplitMix64 counter stream as dyadic
float32 uniforms (no transcendentals), so any language reproduces the
exact same bits: tensor k's values occupy the counter range
[offset_k, offset_k + size_k) in the canonical tensor_schema() order.
"""

from __future__ import annotations

import numpy as np

from .. import rng as rngmod
from .gpt2 import Gpt2Weights, tensor_schema

# Uniform half-width per tensor kind; layer norms sit near identity.
EMBED_SCALE = 0.04
PROJ_SCALE_BY_SUFFIX = {
    "attn.qkv.w": 0.036,  # ~1/sqrt(768)
    "attn.proj.w": 0.018,
    "mlp.fc.w": 0.036,
    "mlp.proj.w": 0.010,  # ~1/sqrt(3072) / 2: tempers the residual stream
}
BIAS_SCALE = 0.01
LN_GAIN_SCALE = 0.10
LN_SHIFT_SCALE = 0.02


def _scale_for(name: str) -> tuple[float, float]:
    """(uniform half-width, additive offset) for one tensor."""
    if name in ("wte", "wpe"):
        return EMBED_SCALE, 0.0
    if name.endswith("ln_1.g") or name.endswith("ln_2.g") or name == "ln_f.g":
        return LN_GAIN_SCALE, 1.0
    if name.endswith(".b"):
        if "ln_1" in name or "ln_2" in name or name == "ln_f.b":
            return LN_SHIFT_SCALE, 0.0
        return BIAS_SCALE, 0.0
    for suffix, scale in PROJ_SCALE_BY_SUFFIX.items():
        if name.endswith(suffix):
            return scale, 0.0
    raise ValueError(f"no scale rule for tensor {name!r}")


def synthetic_tensors(seed: int) -> dict[str, np.ndarray]:
    tensors: dict[str, np.ndarray] = {}
    offset = 0
    for name, shape in tensor_schema():
        size = int(np.prod(shape))
        scale, shift = _scale_for(name)
        vals = rngmod.uniform_f32(seed, offset, size, scale)
        if shift:
            vals = vals + np.float32(shift)
        tensors[name] = vals.reshape(shape)
        offset += size
    return tensors


def synthetic_gpt2_weights(seed: int) -> Gpt2Weights:
    return Gpt2Weights(synthetic_tensors(seed))
