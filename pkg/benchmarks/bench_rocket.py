#!/usr/bin/env python3
"""Backend benchmark for the random-kernel extractor.

Compares the numba @njit kernel against the pure-numpy fallback on the
same bank and inputs (both selected via DEEPFEAT_BACKEND), checking
bit-identity of outputs while timing throughput.

Usage: python benchmarks/bench_rocket.py [--samples 100] [--length 128]
"""

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src"))

from deepfeat import rocket  # noqa: E402
from deepfeat.backend import use_numba  # noqa: E402


def run_backend(name: str, series_list, bank):
    os.environ["DEEPFEAT_BACKEND"] = name
    if name == "numba" and not use_numba():
        return None, None
    rocket.extract(series_list[0], bank)  # warm up (jit compile / cache touch)
    t0 = time.perf_counter()
    out = rocket.extract_matrix(series_list, bank)
    return out, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=100)
    parser.add_argument("--length", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    series_list = [rng.normal(size=args.length) for _ in range(args.samples)]
    bank = rocket.generate_bank(seed=args.seed)
    print(f"bank: {len(bank)} kernels | {args.samples} series of length {args.length}")

    results = {}
    for name in ("numpy", "numba"):
        out, dt = run_backend(name, series_list, bank)
        if out is None:
            print(f"{name:>6}: unavailable")
            continue
        results[name] = out
        rate = args.samples / dt
        print(f"{name:>6}: {dt:8.3f}s total  {1000 * dt / args.samples:7.2f} ms/series  {rate:7.1f} series/s")

    if len(results) == 2:
        identical = np.array_equal(results["numpy"], results["numba"])
        print(f"outputs bit-identical across backends: {identical}")
        if not identical:
            sys.exit(1)


if __name__ == "__main__":
    main()
