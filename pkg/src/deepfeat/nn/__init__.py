from .tensor import Tensor, Parameter, parameters_of
from . import ops
from .ops import (
    add,
    clip,
    concat,
    conv1d,
    dense,
    dropout,
    gather_classes,
    layer_norm,
    matmul,
    max_over_time,
    mean_all,
    mul,
    narrow,
    powc,
    relu,
    sigmoid,
    softmax,
    stack_time,
    sub,
    sum_all,
    tanh,
)
from .gru import BiGruStack, GruParams, bigru_forward, bigru_stack, gru_cell, gru_params, gru_run
from .init import glorot_uniform
from .loss import cross_entropy, focal_loss
from .optim import Adam, AdamState, DivergenceError, LrSchedule, adam_step, lr_at
from .gradcheck import grad_check

__all__ = [
    "Tensor",
    "Parameter",
    "parameters_of",
    "ops",
    "add",
    "clip",
    "concat",
    "conv1d",
    "dense",
    "dropout",
    "gather_classes",
    "layer_norm",
    "matmul",
    "max_over_time",
    "mean_all",
    "mul",
    "narrow",
    "powc",
    "relu",
    "sigmoid",
    "softmax",
    "stack_time",
    "sub",
    "sum_all",
    "tanh",
    "BiGruStack",
    "GruParams",
    "bigru_forward",
    "bigru_stack",
    "gru_cell",
    "gru_params",
    "gru_run",
    "glorot_uniform",
    "cross_entropy",
    "focal_loss",
    "Adam",
    "AdamState",
    "DivergenceError",
    "LrSchedule",
    "adam_step",
    "lr_at",
    "grad_check",
]
