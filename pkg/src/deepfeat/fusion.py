"""Per-branch dense transformation, classifier head, and the full model.

Every branch is projected into its own 64-wide dense space (the widest,
20,000-d randomized vector goes through a 1024-wide intermediate first);
each dense layer is followed by layer normalization then ReLU. The blocks
concatenate in branch order g, c, r, l, so fused width is 64 x active
branches. The direct-concatenation variant skips all of this and feeds the
raw 21,152-wide concatenation straight to the classifier head.

Classifier head: dense 128 -> LN -> ReLU -> dropout(0.5) -> dense 64 ->
LN -> ReLU -> dropout(0.5) -> dense C -> softmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .nn.tensor import Parameter, Tensor

DFT_WIDTH = 64
DFT_R_INTERMEDIATE = 1024
HEAD_HIDDEN = (128, 64)
DROPOUT_RATE = 0.5

BRANCH_WIDTHS = {"g": 128, "c": 256, "r": 20000, "l": 768}
BRANCH_ORDER = ("g", "c", "r", "l")
DC_WIDTH = sum(BRANCH_WIDTHS.values())  # 21152


@dataclass
class DenseLn:
    w: Parameter
    b: Parameter
    gamma: Parameter
    beta: Parameter


def _dense_ln(in_width: int, out_width: int, rng, name: str, dtype) -> DenseLn:
    return DenseLn(
        w=Parameter(nn.glorot_uniform((out_width, in_width), rng).astype(dtype), name=f"{name}.w"),
        b=Parameter(np.zeros(out_width, dtype=dtype), name=f"{name}.b"),
        gamma=Parameter(np.ones(out_width, dtype=dtype), name=f"{name}.ln.g"),
        beta=Parameter(np.zeros(out_width, dtype=dtype), name=f"{name}.ln.b"),
    )


def _apply_dense_ln(x: Tensor, layer: DenseLn) -> Tensor:
    return nn.relu(nn.layer_norm(nn.dense(x, layer.w, layer.b), layer.gamma, layer.beta))


@dataclass
class DftParams:
    blocks: dict[str, list[DenseLn]]  # branch key -> stage list (r has two)

    @property
    def output_width(self) -> int:
        return DFT_WIDTH * len(self.blocks)


def dft_params(
    rng: np.random.Generator,
    branches=BRANCH_ORDER,
    widths: dict[str, int] | None = None,
    dtype=np.float32,
) -> DftParams:
    widths = dict(BRANCH_WIDTHS if widths is None else widths)
    blocks: dict[str, list[DenseLn]] = {}
    for key in branches:
        if key == "r":
            blocks[key] = [
                _dense_ln(widths[key], DFT_R_INTERMEDIATE, rng, "dft.r0", dtype),
                _dense_ln(DFT_R_INTERMEDIATE, DFT_WIDTH, rng, "dft.r1", dtype),
            ]
        else:
            blocks[key] = [_dense_ln(widths[key], DFT_WIDTH, rng, f"dft.{key}", dtype)]
    return DftParams(blocks=blocks)


def dft(features: dict[str, Tensor], params: DftParams) -> Tensor:
    """Project each active branch to 64-d and concatenate in g, c, r, l order."""
    outs = []
    for key in BRANCH_ORDER:
        if key not in params.blocks:
            continue
        if key not in features:
            raise ValueError(f"missing features for branch {key!r}")
        x = features[key]
        for stage in params.blocks[key]:
            x = _apply_dense_ln(x, stage)
        outs.append(x)
    return nn.concat(outs, axis=-1) if len(outs) > 1 else outs[0]


def direct_concat(features: dict[str, Tensor]) -> Tensor:
    """Raw concatenation in g, c, r, l order (no transformation)."""
    parts = []
    for key in BRANCH_ORDER:
        if key not in features:
            raise ValueError(f"missing features for branch {key!r}")
        parts.append(features[key])
    return nn.concat(parts, axis=-1)


@dataclass
class HeadParams:
    hidden: list[DenseLn]
    out_w: Parameter
    out_b: Parameter

    @property
    def n_classes(self) -> int:
        return self.out_w.data.shape[0]


def head_params(in_width: int, n_classes: int, rng: np.random.Generator, dtype=np.float32) -> HeadParams:
    if n_classes < 2:
        raise ValueError("classifier needs at least 2 classes")
    hidden = []
    width = in_width
    for i, h in enumerate(HEAD_HIDDEN):
        hidden.append(_dense_ln(width, h, rng, f"head.h{i}", dtype))
        width = h
    return HeadParams(
        hidden=hidden,
        out_w=Parameter(nn.glorot_uniform((n_classes, width), rng).astype(dtype), name="head.out.w"),
        out_b=Parameter(np.zeros(n_classes, dtype=dtype), name="head.out.b"),
    )


def mlp_head(
    x: Tensor,
    params: HeadParams,
    training: bool = False,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Class distribution over the last axis; dropout active only in training."""
    for stage in params.hidden:
        x = _apply_dense_ln(x, stage)
        x = nn.dropout(x, DROPOUT_RATE, training=training, rng=rng)
    return nn.softmax(nn.dense(x, params.out_w, params.out_b))
