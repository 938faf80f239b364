"""GRU cell and bidirectional stack behavior."""

import numpy as np

from deepfeat import nn
from deepfeat.nn.gru import GruParams, gru_cell, gru_params
from deepfeat.nn.tensor import Parameter, Tensor


def scalar_gru_oracle(x, h, W, U, b):
    """Step-by-step scalar reference for one GRU update (gate order z, r, h)."""
    H = len(h)

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    def gate(row):
        return sum(W[row, j] * x[j] for j in range(len(x))) + b[row]

    zs = np.array([sig(gate(i) + sum(U[i, j] * h[j] for j in range(H))) for i in range(H)])
    rs = np.array([sig(gate(H + i) + sum(U[H + i, j] * h[j] for j in range(H))) for i in range(H)])
    rh = rs * h
    hts = np.array([np.tanh(gate(2 * H + i) + sum(U[2 * H + i, j] * rh[j] for j in range(H))) for i in range(H)])
    return zs * h + (1 - zs) * hts


def zero_params(input_size, hidden):
    return GruParams(
        w=Parameter(np.zeros((3 * hidden, input_size))),
        u=Parameter(np.zeros((3 * hidden, hidden))),
        b=Parameter(np.zeros(3 * hidden)),
    )


class TestGruCell:
    def test_zero_params_halve_state(self):
        h0 = np.array([2.0, -4.0, 6.0])
        out = gru_cell(Tensor(np.ones(2)), Tensor(h0), zero_params(2, 3))
        np.testing.assert_allclose(out.data, 0.5 * h0, rtol=1e-7)

    def test_all_zero_fixture(self):
        out = gru_cell(Tensor(np.zeros(2)), Tensor(np.zeros(3)), zero_params(2, 3))
        np.testing.assert_array_equal(out.data, np.zeros(3))

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(17)
        x, h = rng.normal(size=4), rng.normal(size=3)
        W, U, b = rng.normal(size=(9, 4)), rng.normal(size=(9, 3)), rng.normal(size=9)
        params = GruParams(w=Parameter(W), u=Parameter(U), b=Parameter(b))
        out = gru_cell(Tensor(x), Tensor(h), params)
        np.testing.assert_allclose(out.data, scalar_gru_oracle(x, h, W, U, b), atol=1e-6)

    def test_gradients(self):
        rng = np.random.default_rng(23)
        x = Tensor(rng.normal(size=3).astype(np.float64))
        h = Tensor(rng.normal(size=2).astype(np.float64))
        params = GruParams(
            w=Parameter(rng.normal(size=(6, 3))),
            u=Parameter(rng.normal(size=(6, 2))),
            b=Parameter(rng.normal(size=6)),
        )

        def f():
            return nn.sum_all(gru_cell(x, h, params))

        assert nn.grad_check(f, [x, h, params.w, params.u, params.b]) < 1e-5


class TestBiGru:
    def test_single_step_directions_agree(self):
        # with shared weights a length-1 sequence is the same single step
        rng = np.random.default_rng(5)
        shared = gru_params(1, 4, rng, "shared", dtype=np.float64)
        stack = nn.BiGruStack([(shared, shared)])
        out = nn.bigru_forward(Tensor(np.array([[0.7]])), stack)
        np.testing.assert_allclose(out.data[:4], out.data[4:], atol=1e-12)

    def test_output_width(self):
        rng = np.random.default_rng(6)
        stack = nn.bigru_stack(1, 8, 2, rng)
        seq = Tensor(np.random.default_rng(0).normal(size=(5, 1)).astype(np.float32))
        assert nn.bigru_forward(seq, stack).data.shape == (16,)
        batch = Tensor(np.random.default_rng(0).normal(size=(3, 5, 1)).astype(np.float32))
        assert nn.bigru_forward(batch, stack).data.shape == (3, 16)

    def test_reversal_swaps_halves_with_shared_weights(self):
        rng = np.random.default_rng(7)
        fwd = gru_params(1, 4, rng, "shared", dtype=np.float64)
        stack = nn.BiGruStack([(fwd, fwd)])
        x = np.random.default_rng(1).normal(size=(6, 1))
        a = nn.bigru_forward(Tensor(x), stack).data
        b = nn.bigru_forward(Tensor(x[::-1].copy()), stack).data
        np.testing.assert_allclose(a[:4], b[4:], atol=1e-12)
        np.testing.assert_allclose(a[4:], b[:4], atol=1e-12)

    def test_batched_matches_loop(self):
        rng = np.random.default_rng(8)
        stack = nn.bigru_stack(1, 3, 2, rng, dtype=np.float64)
        xs = np.random.default_rng(2).normal(size=(4, 7, 1))
        batched = nn.bigru_forward(Tensor(xs), stack).data
        for i in range(4):
            single = nn.bigru_forward(Tensor(xs[i]), stack).data
            np.testing.assert_allclose(batched[i], single, atol=1e-10)

    def test_gradients_through_stack(self):
        rng = np.random.default_rng(9)
        stack = nn.bigru_stack(1, 2, 2, rng, dtype=np.float64)
        seq = Tensor(np.random.default_rng(3).normal(size=(4, 1)))
        params = [p for pair in stack.layers for gp in pair for p in (gp.w, gp.u, gp.b)]

        def f():
            return nn.sum_all(nn.relu(nn.bigru_forward(seq, stack)))

        assert nn.grad_check(f, [seq] + params, max_coords=20) < 1e-5
