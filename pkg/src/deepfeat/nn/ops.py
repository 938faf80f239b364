"""Differentiable operations.

Every op accepts single samples or batches: the feature axis is always the
last one, and a leading batch axis broadcasts through untouched. Backward
closures unbroadcast gradients so bias vectors and scalar constants behave.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .tensor import Tensor


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum g down to `shape` (inverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def add(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data + b.data, _parents=(a, b))

    def backward():
        g = out.grad
        a.accumulate(_unbroadcast(g, a.data.shape))
        b.accumulate(_unbroadcast(g, b.data.shape))

    out._backward = backward
    return out


def sub(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data - b.data, _parents=(a, b))

    def backward():
        g = out.grad
        a.accumulate(_unbroadcast(g, a.data.shape))
        b.accumulate(_unbroadcast(-g, b.data.shape))

    out._backward = backward
    return out


def mul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.data * b.data, _parents=(a, b))

    def backward():
        g = out.grad
        a.accumulate(_unbroadcast(g * b.data, a.data.shape))
        b.accumulate(_unbroadcast(g * a.data, b.data.shape))

    out._backward = backward
    return out


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """a @ b for 1-D/2-D operands (vectors promote the numpy way)."""
    out = Tensor(a.data @ b.data, _parents=(a, b))

    def backward():
        g = out.grad
        ad, bd = a.data, b.data
        if ad.ndim == 1 and bd.ndim == 2:  # [n] @ [n,m] -> [m]
            a.accumulate(g @ bd.T)
            b.accumulate(np.outer(ad, g))
        elif ad.ndim == 2 and bd.ndim == 1:  # [B,n] @ [n] -> [B]
            a.accumulate(np.outer(g, bd))
            b.accumulate(ad.T @ g)
        elif ad.ndim == 1 and bd.ndim == 1:  # dot -> scalar
            a.accumulate(g * bd)
            b.accumulate(g * ad)
        else:
            a.accumulate(g @ bd.T)
            b.accumulate(ad.T @ g)

    out._backward = backward
    return out


def dense(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    """y = W x + b with W stored [out, in]; x may be [in], [B, in] or [B, T, in]."""
    if w.data.shape[1] != x.data.shape[-1]:
        raise ValueError(f"dense: input width {x.data.shape[-1]} does not match W {w.data.shape}")
    if b is not None and b.data.shape != (w.data.shape[0],):
        raise ValueError(f"dense: bias shape {b.data.shape} does not match W {w.data.shape}")
    y = x.data @ w.data.T
    if b is not None:
        y = y + b.data
    parents = (x, w, b) if b is not None else (x, w)
    out = Tensor(y, _parents=parents)

    def backward():
        g = out.grad
        if g.ndim == 1:
            x.accumulate(g @ w.data)
            w.accumulate(np.outer(g, x.data))
            if b is not None:
                b.accumulate(g)
        else:
            x.accumulate(g @ w.data)
            g2 = g.reshape(-1, g.shape[-1])
            x2 = x.data.reshape(-1, x.data.shape[-1])
            w.accumulate(g2.T @ x2)
            if b is not None:
                b.accumulate(g2.sum(axis=0))

    out._backward = backward
    return out


def relu(x: Tensor) -> Tensor:
    out = Tensor(np.maximum(x.data, 0), _parents=(x,))

    def backward():
        x.accumulate(out.grad * (x.data > 0))

    out._backward = backward
    return out


def sigmoid(x: Tensor) -> Tensor:
    s = 1.0 / (1.0 + np.exp(-x.data))
    out = Tensor(s, _parents=(x,))

    def backward():
        x.accumulate(out.grad * s * (1.0 - s))

    out._backward = backward
    return out


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)
    out = Tensor(t, _parents=(x,))

    def backward():
        x.accumulate(out.grad * (1.0 - t * t))

    out._backward = backward
    return out


def log(x: Tensor) -> Tensor:
    out = Tensor(np.log(x.data), _parents=(x,))

    def backward():
        x.accumulate(out.grad / x.data)

    out._backward = backward
    return out


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    """Clamp values; gradient passes only where the input was inside [lo, hi]."""
    out = Tensor(np.clip(x.data, lo, hi), _parents=(x,))

    def backward():
        inside = (x.data >= lo) & (x.data <= hi)
        x.accumulate(out.grad * inside)

    out._backward = backward
    return out


def powc(x: Tensor, p: float) -> Tensor:
    """x ** p for a python-scalar exponent; p == 0 short-circuits to ones."""
    if p == 0:
        return Tensor(np.ones_like(x.data))
    out = Tensor(x.data**p, _parents=(x,))

    def backward():
        x.accumulate(out.grad * p * x.data ** (p - 1))

    out._backward = backward
    return out


def concat(parts: Sequence[Tensor], axis: int = -1) -> Tensor:
    out = Tensor(np.concatenate([t.data for t in parts], axis=axis), _parents=tuple(parts))
    sizes = [t.data.shape[axis] for t in parts]

    def backward():
        offset = 0
        for t, size in zip(parts, sizes):
            idx = [slice(None)] * out.grad.ndim
            idx[axis if axis >= 0 else out.grad.ndim + axis] = slice(offset, offset + size)
            t.accumulate(out.grad[tuple(idx)])
            offset += size

    out._backward = backward
    return out


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis."""
    idx = [slice(None)] * x.data.ndim
    ax = axis if axis >= 0 else x.data.ndim + axis
    idx[ax] = slice(start, start + length)
    out = Tensor(x.data[tuple(idx)], _parents=(x,))

    def backward():
        g = np.zeros_like(x.data)
        g[tuple(idx)] = out.grad
        x.accumulate(g)

    out._backward = backward
    return out


def stack_time(steps: Sequence[Tensor]) -> Tensor:
    """Stack per-step outputs [B, H] (or [H]) into [B, T, H] (or [T, H])."""
    out = Tensor(np.stack([t.data for t in steps], axis=-2), _parents=tuple(steps))

    def backward():
        g = np.moveaxis(out.grad, -2, 0)
        for t, gt in zip(steps, g):
            t.accumulate(gt)

    out._backward = backward
    return out


def sum_all(x: Tensor) -> Tensor:
    out = Tensor(np.asarray(x.data.sum(), dtype=x.data.dtype), _parents=(x,))

    def backward():
        x.accumulate(np.broadcast_to(out.grad, x.data.shape).astype(x.data.dtype))

    out._backward = backward
    return out


def mean_all(x: Tensor) -> Tensor:
    n = x.data.size
    out = Tensor(np.asarray(x.data.mean(), dtype=x.data.dtype), _parents=(x,))

    def backward():
        x.accumulate(np.broadcast_to(out.grad / n, x.data.shape).astype(x.data.dtype))

    out._backward = backward
    return out


def max_over_time(x: Tensor) -> Tensor:
    """Global max pool over the time axis: [B, T, C] -> [B, C] or [T, C] -> [C].

    Gradient flows to the first maximal timestep of each channel (numpy
    argmax tie-breaking).
    """
    axis = x.data.ndim - 2
    am = x.data.argmax(axis=axis)
    out = Tensor(np.take_along_axis(x.data, np.expand_dims(am, axis), axis=axis).squeeze(axis), _parents=(x,))

    def backward():
        g = np.zeros_like(x.data)
        np.put_along_axis(g, np.expand_dims(am, axis), np.expand_dims(out.grad, axis), axis=axis)
        x.accumulate(g)

    out._backward = backward
    return out


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit population variance, then scale-shift."""
    if x.data.shape[-1] < 2:
        raise ValueError("layer_norm needs at least 2 features")
    if eps <= 0:
        raise ValueError("layer_norm eps must be > 0")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out = Tensor(gamma.data * xhat + beta.data, _parents=(x, gamma, beta))

    def backward():
        g = out.grad
        n = x.data.shape[-1]
        gx = g * gamma.data
        # d/dx of (x - mu) * inv with mu, inv functions of x:
        dot = (gx * xhat).sum(axis=-1, keepdims=True)
        gsum = gx.sum(axis=-1, keepdims=True)
        x.accumulate(inv * (gx - gsum / n - xhat * dot / n))
        red = tuple(range(g.ndim - 1))
        gamma.accumulate((g * xhat).sum(axis=red) if red else g * xhat)
        beta.accumulate(g.sum(axis=red) if red else g.copy())

    out._backward = backward
    return out


def softmax(x: Tensor) -> Tensor:
    """Shift-stable softmax over the last axis."""
    z = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=-1, keepdims=True)
    out = Tensor(y, _parents=(x,))

    def backward():
        g = out.grad
        dot = (g * y).sum(axis=-1, keepdims=True)
        x.accumulate(y * (g - dot))

    out._backward = backward
    return out


def dropout(x: Tensor, rate: float, training: bool, rng: Optional[np.random.Generator] = None) -> Tensor:
    """Inverted dropout: scales survivors by 1/(1-rate) so eval mode is identity."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        out = Tensor(x.data.copy(), _parents=(x,))

        def backward_id():
            x.accumulate(out.grad)

        out._backward = backward_id
        return out
    if rng is None:
        raise ValueError("dropout in training mode needs an explicit generator")
    keep = (rng.random(x.data.shape) >= rate).astype(x.data.dtype) / (1.0 - rate)
    out = Tensor(x.data * keep, _parents=(x,))

    def backward():
        x.accumulate(out.grad * keep)

    out._backward = backward
    return out


def gather_classes(probs: Tensor, targets) -> Tensor:
    """Pick per-sample class entries: [C] with int target, or [B, C] with [B] targets."""
    t = np.asarray(targets)
    if probs.data.ndim == 1:
        if not (0 <= int(t) < probs.data.shape[0]):
            raise IndexError(f"target {int(t)} out of range for {probs.data.shape[0]} classes")
        out = Tensor(probs.data[int(t) : int(t) + 1], _parents=(probs,))

        def backward_1d():
            g = np.zeros_like(probs.data)
            g[int(t)] = out.grad[0]
            probs.accumulate(g)

        out._backward = backward_1d
        return out
    if t.min() < 0 or t.max() >= probs.data.shape[1]:
        raise IndexError("target index out of range")
    rows = np.arange(probs.data.shape[0])
    out = Tensor(probs.data[rows, t], _parents=(probs,))

    def backward():
        g = np.zeros_like(probs.data)
        g[rows, t] = out.grad
        probs.accumulate(g)

    out._backward = backward
    return out


def conv1d(
    x: Tensor,
    w: Tensor,
    b: Optional[Tensor] = None,
    dilation: int = 1,
    padding: int = 0,
) -> Tensor:
    """Dilated 1-D convolution (cross-correlation), zero padded.

    x: [T, Cin] or [B, T, Cin]; w: [k, Cin, Cout]; output [*, T', Cout] with
    T' = T + 2*padding - (k-1)*dilation. Raises when the receptive field
    does not fit the padded series.
    """
    k, cin, cout = w.data.shape
    single = x.data.ndim == 2
    xd = x.data[None] if single else x.data
    if xd.shape[-1] != cin:
        raise ValueError(f"conv1d: {xd.shape[-1]} input channels, kernel expects {cin}")
    t_in = xd.shape[1]
    t_out = t_in + 2 * padding - (k - 1) * dilation
    if t_out < 1:
        raise ValueError(
            f"conv1d: series of length {t_in} shorter than receptive field {(k - 1) * dilation + 1} (padding {padding})"
        )
    if padding:
        xp = np.zeros((xd.shape[0], t_in + 2 * padding, cin), dtype=xd.dtype)
        xp[:, padding : padding + t_in] = xd
    else:
        xp = xd
    # Accumulate tap by tap in index order; for Cin = 1 this reproduces the
    # scalar double-loop summation bit for bit.
    y = np.zeros((xp.shape[0], t_out, cout), dtype=xd.dtype)
    for j in range(k):
        y += xp[:, j * dilation : j * dilation + t_out] @ w.data[j]
    if b is not None:
        y += b.data
    parents = (x, w) if b is None else (x, w, b)
    out = Tensor(y[0] if single else y, _parents=parents)

    def backward():
        g = out.grad[None] if single else out.grad
        dw = np.empty_like(w.data)
        gxp = np.zeros_like(xp)
        for j in range(k):  # k is small (3..11)
            tap = xp[:, j * dilation : j * dilation + t_out]
            dw[j] = np.tensordot(tap, g, axes=([0, 1], [0, 1]))
            gxp[:, j * dilation : j * dilation + t_out] += g @ w.data[j].T
        w.accumulate(dw)
        if b is not None:
            b.accumulate(g.sum(axis=(0, 1)))
        gx = gxp[:, padding : padding + t_in] if padding else gxp
        x.accumulate(gx[0] if single else gx)

    out._backward = backward
    return out
