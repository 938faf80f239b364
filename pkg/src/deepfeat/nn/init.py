"""Weight initialization: uniform Glorot-style, fan-based, seedable."""

from __future__ import annotations

import math

import numpy as np


def glorot_uniform(shape: tuple, rng: np.random.Generator, fan_in: int | None = None, fan_out: int | None = None) -> np.ndarray:
    """U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).

    Default fans: for 2-D [out, in] weights fan_in = in, fan_out = out; for
    conv kernels [k, Cin, Cout] fan_in = k*Cin, fan_out = k*Cout.
    """
    if fan_in is None or fan_out is None:
        if len(shape) == 2:
            fan_out, fan_in = shape
        elif len(shape) == 3:
            k, cin, cout = shape
            fan_in, fan_out = k * cin, k * cout
        else:
            n = int(np.prod(shape))
            fan_in = fan_out = n
    a = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=shape)
