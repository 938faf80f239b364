"""Adam, the lr schedule and focal loss against scalar references."""

import numpy as np
import pytest

from deepfeat import nn
from deepfeat.nn.optim import AdamState, DivergenceError, LrSchedule, adam_step, lr_at
from deepfeat.nn.tensor import Parameter, Tensor


def scalar_adam_reference(w0, grads, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Textbook Adam trajectory on a scalar weight."""
    w, m, v = w0, 0.0, 0.0
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        mhat = m / (1 - beta1**t)
        vhat = v / (1 - beta2**t)
        w -= lr * mhat / (np.sqrt(vhat) + eps)
    return w


class TestAdam:
    def test_zero_grad_leaves_value_bit_identical(self):
        p = Parameter(np.array([1.25, -3.5, 0.0625]))
        before = p.data.copy()
        state = AdamState.for_param(p)
        p.zero_grad()
        for _ in range(5):
            adam_step(p, state, lr=0.01)
        np.testing.assert_array_equal(p.data, before)

    def test_first_step_magnitude_near_lr(self):
        p = Parameter(np.array([0.0]))
        p.grad = np.array([3.7])
        adam_step(p, AdamState.for_param(p), lr=0.001)
        assert abs(abs(p.data[0]) - 0.001) < 1e-6

    def test_quadratic_trajectory_matches_scalar_reference(self):
        w = Parameter(np.array([2.0]))
        state = AdamState.for_param(w)
        grads = []
        for _ in range(3):
            g = 2.0 * w.data[0]  # d/dw w^2
            grads.append(g)
            w.grad = np.array([g])
            adam_step(w, state, lr=0.1)
        expect = scalar_adam_reference(2.0, grads, 0.1)
        assert abs(w.data[0] - expect) < 1e-10

    def test_nonfinite_gradient_raises(self):
        p = Parameter(np.array([1.0]))
        p.grad = np.array([np.nan])
        with pytest.raises(DivergenceError):
            adam_step(p, AdamState.for_param(p), lr=0.01)


class TestLrSchedule:
    def test_flat_before_first_decay(self):
        s = LrSchedule(lr0=0.001, decay_steps=100, decay_rate=0.5)
        for step in (0, 1, 50, 99):
            assert lr_at(s, step) == 0.001

    def test_decay_points(self):
        s = LrSchedule(lr0=0.001, decay_steps=100, decay_rate=0.5)
        assert abs(lr_at(s, 100) - 0.000667) < 5e-7
        assert lr_at(s, 250) == pytest.approx(0.0005, rel=1e-12)

    def test_non_increasing(self):
        s = LrSchedule(lr0=0.01, decay_steps=7, decay_rate=0.3)
        vals = [lr_at(s, t) for t in range(200)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(v > 0 for v in vals)


class TestFocalLoss:
    def test_gamma_zero_is_cross_entropy(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            logits = rng.normal(size=6)
            probs = np.exp(logits) / np.exp(logits).sum()
            t = int(rng.integers(6))
            fl = nn.focal_loss(Tensor(probs), t, gamma=0.0, alpha=1.0).item()
            assert abs(fl - (-np.log(probs[t]))) < 1e-12

    def test_perfect_prediction_zero_loss(self):
        probs = np.zeros(4)
        probs[2] = 1.0
        assert nn.focal_loss(Tensor(probs), 2, gamma=2.0, alpha=0.25).item() == 0.0

    def test_scalar_fixture(self):
        loss = nn.focal_loss(Tensor(np.array([0.5, 0.5])), 0, gamma=2.0, alpha=0.25).item()
        assert abs(loss - 0.25 * 0.25 * np.log(2.0)) < 1e-9

    def test_invalid_target(self):
        with pytest.raises(IndexError):
            nn.focal_loss(Tensor(np.array([0.5, 0.5])), 2)

    def test_batch_mean_matches_singles(self):
        rng = np.random.default_rng(1)
        probs = rng.dirichlet(np.ones(5), size=8)
        targets = rng.integers(5, size=8)
        batch = nn.focal_loss(Tensor(probs), targets).item()
        singles = np.mean([nn.focal_loss(Tensor(probs[i]), int(targets[i])).item() for i in range(8)])
        assert abs(batch - singles) < 1e-7
