"""Gated recurrent units and the bidirectional stack.

Gate convention (fixed so the all-zero-parameter fixture is exact):

    z = sigmoid(Wz x + Uz h + bz)
    r = sigmoid(Wr x + Ur h + br)
    htilde = tanh(Wh x + Uh (r * h) + bh)
    h' = z * h_prev + (1 - z) * htilde

Projections are stored fused as W [3H, in], U [3H, H], b [3H] with gate
order (z, r, h).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops
from .tensor import Parameter, Tensor
from .init import glorot_uniform


@dataclass
class GruParams:
    w: Parameter  # [3H, in]
    u: Parameter  # [3H, H]
    b: Parameter  # [3H]

    @property
    def hidden(self) -> int:
        return self.u.data.shape[1]


def gru_params(input_size: int, hidden: int, rng: np.random.Generator, name: str, dtype=np.float32) -> GruParams:
    return GruParams(
        w=Parameter(glorot_uniform((3 * hidden, input_size), rng).astype(dtype), name=f"{name}.w"),
        u=Parameter(glorot_uniform((3 * hidden, hidden), rng).astype(dtype), name=f"{name}.u"),
        b=Parameter(np.zeros(3 * hidden, dtype=dtype), name=f"{name}.b"),
    )


def gru_cell(x: Tensor, h_prev: Tensor, params: GruParams) -> Tensor:
    h = params.hidden
    gx = ops.dense(x, params.w, params.b)  # [.., 3H]
    gz = ops.narrow(gx, -1, 0, h)
    gr = ops.narrow(gx, -1, h, h)
    gh = ops.narrow(gx, -1, 2 * h, h)
    uz = ops.narrow(params.u, 0, 0, h)
    ur = ops.narrow(params.u, 0, h, h)
    uh = ops.narrow(params.u, 0, 2 * h, h)
    z = ops.sigmoid(gz + ops.dense(h_prev, uz))
    r = ops.sigmoid(gr + ops.dense(h_prev, ur))
    htilde = ops.tanh(gh + ops.dense(ops.mul(r, h_prev), uh))
    one = Tensor(np.ones_like(z.data))
    return ops.mul(z, h_prev) + ops.mul(one - z, htilde)


def gru_run(seq: Tensor, params: GruParams, reverse: bool = False) -> list[Tensor]:
    """Unroll one direction over [B, T, in] (or [T, in]); returns per-step states in input order.

    Input projections for every step are computed in one batched matmul up
    front, and the z/r hidden projections share one fused matmul per step;
    the math is identical to repeated gru_cell calls.
    """
    batched = seq.data.ndim == 3
    t_len = seq.data.shape[-2]
    hdim = params.hidden
    h_shape = (seq.data.shape[0], hdim) if batched else (hdim,)
    h = Tensor(np.zeros(h_shape, dtype=seq.data.dtype))
    gx_all = ops.dense(seq, params.w, params.b)  # [.., T, 3H]
    u_zr = ops.narrow(params.u, 0, 0, 2 * hdim)
    u_h = ops.narrow(params.u, 0, 2 * hdim, hdim)
    order = range(t_len - 1, -1, -1) if reverse else range(t_len)
    states: list[Tensor] = [None] * t_len  # type: ignore[list-item]
    for t in order:
        gx = _step_slice(gx_all, t)
        hu = ops.dense(h, u_zr)
        z = ops.sigmoid(ops.narrow(gx, -1, 0, hdim) + ops.narrow(hu, -1, 0, hdim))
        r = ops.sigmoid(ops.narrow(gx, -1, hdim, hdim) + ops.narrow(hu, -1, hdim, hdim))
        htilde = ops.tanh(ops.narrow(gx, -1, 2 * hdim, hdim) + ops.dense(ops.mul(r, h), u_h))
        # z*h + (1-z)*htilde, rewritten with one fewer elementwise op
        h = htilde + ops.mul(z, h - htilde)
        states[t] = h
    return states


def _step_slice(x: Tensor, t: int) -> Tensor:
    """x[.., t, :] with gradient scatter back into the time axis.

    Scatters straight into the parent's grad buffer: one zeros_like of the
    whole sequence per unroll instead of one per step.
    """
    ax = x.data.ndim - 2
    idx = (slice(None),) * ax + (t,)
    out = Tensor(x.data[idx], _parents=(x,))

    def backward():
        if x.grad is None:
            x.grad = np.zeros_like(x.data)
        x.grad[idx] += out.grad

    out._backward = backward
    return out


@dataclass
class BiGruStack:
    """Stack of bidirectional GRU layers; layer i parameters for both directions."""

    layers: list[tuple[GruParams, GruParams]]  # (forward, backward) per layer

    @property
    def output_width(self) -> int:
        return 2 * self.layers[-1][0].hidden


def bigru_stack(input_size: int, hidden: int, depth: int, rng: np.random.Generator, name: str = "bigru", dtype=np.float32) -> BiGruStack:
    layers = []
    size = input_size
    for i in range(depth):
        fwd = gru_params(size, hidden, rng, f"{name}.l{i}.fwd", dtype)
        bwd = gru_params(size, hidden, rng, f"{name}.l{i}.bwd", dtype)
        layers.append((fwd, bwd))
        size = 2 * hidden
    return BiGruStack(layers)


def bigru_forward(seq: Tensor, stack: BiGruStack) -> Tensor:
    """Run the stack over [B, T, Cin] or [T, Cin].

    Non-final layers emit full sequences [.., T, 2H]; the final layer emits
    final forward state concatenated with final backward state [.., 2H].
    """
    if seq.data.shape[-2] < 1:
        raise ValueError("bigru_forward: empty sequence")
    x = seq
    for i, (fwd, bwd) in enumerate(stack.layers):
        f_states = gru_run(x, fwd, reverse=False)
        b_states = gru_run(x, bwd, reverse=True)
        if i < len(stack.layers) - 1:
            merged = [ops.concat([f, b], axis=-1) for f, b in zip(f_states, b_states)]
            x = ops.stack_time(merged)
        else:
            # final forward state is at t = T-1, final backward state at t = 0
            return ops.concat([f_states[-1], b_states[0]], axis=-1)
    raise AssertionError("unreachable")
