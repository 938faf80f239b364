"""Trainable feature branches: recurrent global and multi-scale convolutional local.

The global branch runs a 2-layer bidirectional GRU (hidden 64 per
direction) and rectifies the final states into a 128-wide non-negative
vector. The local branch runs four convolution stacks with kernel sizes
3/5/7/11 (two same-padded layers of 64 filters each, ReLU between), global
max pool over time, concatenated in kernel-size order into 256 features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nn
from .nn.tensor import Parameter, Tensor

GLOBAL_HIDDEN = 64
GLOBAL_DEPTH = 2
LOCAL_FILTERS = 64
LOCAL_KERNELS = (3, 5, 7, 11)
LOCAL_LAYERS = 2


@dataclass
class GlobalBranchParams:
    stack: nn.BiGruStack

    @property
    def output_width(self) -> int:
        return self.stack.output_width


def global_branch_params(
    rng: np.random.Generator,
    input_channels: int = 1,
    hidden: int = GLOBAL_HIDDEN,
    depth: int = GLOBAL_DEPTH,
    dtype=np.float32,
) -> GlobalBranchParams:
    return GlobalBranchParams(stack=nn.bigru_stack(input_channels, hidden, depth, rng, name="global", dtype=dtype))


def global_branch(series: Tensor, params: GlobalBranchParams) -> Tensor:
    """[T, 1] or [B, T, 1] -> non-negative [.., 2*hidden]."""
    return nn.relu(nn.bigru_forward(series, params.stack))


@dataclass
class ConvStack:
    kernel_size: int
    weights: list[Parameter] = field(default_factory=list)  # [k, Cin, Cout] per layer
    biases: list[Parameter] = field(default_factory=list)


@dataclass
class LocalBranchParams:
    stacks: list[ConvStack]

    @property
    def output_width(self) -> int:
        return sum(s.weights[-1].data.shape[2] for s in self.stacks)


def local_branch_params(
    rng: np.random.Generator,
    input_channels: int = 1,
    filters: int = LOCAL_FILTERS,
    kernel_sizes=LOCAL_KERNELS,
    layers: int = LOCAL_LAYERS,
    dtype=np.float32,
) -> LocalBranchParams:
    stacks = []
    for k in kernel_sizes:
        stack = ConvStack(kernel_size=k)
        cin = input_channels
        for li in range(layers):
            stack.weights.append(
                Parameter(nn.glorot_uniform((k, cin, filters), rng).astype(dtype), name=f"local.k{k}.conv{li}.w")
            )
            stack.biases.append(Parameter(np.zeros(filters, dtype=dtype), name=f"local.k{k}.conv{li}.b"))
            cin = filters
        stacks.append(stack)
    return LocalBranchParams(stacks=stacks)


def local_branch(series: Tensor, params: LocalBranchParams) -> Tensor:
    """[T, 1] or [B, T, 1] -> [.., filters * len(kernel_sizes)], order 3,5,7,11."""
    outs = []
    for stack in params.stacks:
        pad = (stack.kernel_size - 1) // 2  # same-length output, stride 1, no dilation
        x = series
        for w, b in zip(stack.weights, stack.biases):
            x = nn.relu(nn.conv1d(x, w, b, dilation=1, padding=pad))
        outs.append(nn.max_over_time(x))
    return nn.concat(outs, axis=-1)
