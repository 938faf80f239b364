"""Adam optimizer and the staircase inverse-time-decay schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Parameter


class DivergenceError(RuntimeError):
    """Raised when a gradient or loss stops being finite."""


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    _scratch: np.ndarray | None = None

    @classmethod
    def for_param(cls, p: Parameter, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        return cls(m=np.zeros_like(p.data), v=np.zeros_like(p.data), beta1=beta1, beta2=beta2, epsilon=epsilon)


def adam_step(param: Parameter, state: AdamState, lr: float) -> None:
    """One bias-corrected Adam update, in place. Rejects non-finite gradients.

    All arithmetic runs through a preallocated scratch buffer; the largest
    parameter here is 20M entries, so per-step temporaries are worth
    avoiding.
    """
    g = param.grad
    if g is None:
        raise ValueError(f"adam_step: parameter {param.name!r} has no gradient")
    if not np.isfinite(g).all():
        raise DivergenceError(f"non-finite gradient in parameter {param.name!r}")
    if state._scratch is None:
        state._scratch = np.empty_like(state.m)
    s = state._scratch
    state.t += 1
    dtype = state.m.dtype.type
    np.multiply(state.m, dtype(state.beta1), out=state.m)
    np.multiply(g, dtype(1.0 - state.beta1), out=s)
    state.m += s
    np.multiply(g, g, out=s)
    np.multiply(s, dtype(1.0 - state.beta2), out=s)
    np.multiply(state.v, dtype(state.beta2), out=state.v)
    state.v += s
    np.divide(state.v, dtype(1.0 - state.beta2**state.t), out=s)
    np.sqrt(s, out=s)
    s += dtype(state.epsilon)
    np.divide(state.m, s, out=s)
    s *= dtype(lr / (1.0 - state.beta1**state.t))
    param.data -= s


@dataclass
class LrSchedule:
    """lr(step) = lr0 / (1 + decay_rate * floor(step / decay_steps)); staircase."""

    lr0: float = 0.001
    decay_steps: int = 100
    decay_rate: float = 0.5


def lr_at(schedule: LrSchedule, step: int) -> float:
    if step < 0:
        raise ValueError("step must be >= 0")
    return schedule.lr0 / (1.0 + schedule.decay_rate * (step // schedule.decay_steps))


@dataclass
class Adam:
    """Per-parameter Adam states plus the schedule, for the training loop."""

    params: list[Parameter]
    schedule: LrSchedule = field(default_factory=LrSchedule)
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0

    def __post_init__(self):
        self.states = [AdamState.for_param(p, self.beta1, self.beta2, self.epsilon) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> float:
        """Apply one update to every parameter at the scheduled rate; returns the lr used."""
        lr = lr_at(self.schedule, self.step_count)
        for p, s in zip(self.params, self.states):
            adam_step(p, s, lr)
        self.step_count += 1
        return lr
