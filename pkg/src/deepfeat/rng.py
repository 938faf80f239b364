"""Deterministic random streams.

Two kinds of randomness with different reproducibility guarantees:

* Counter-based SplitMix64 streams. Pure integer mixing, so the raw
  64-bit outputs are bit-identical on every platform and in every
  language that implements the same arithmetic. Used where artifacts
  must reproduce exactly (random kernel bank, synthetic transformer
  weights shared with the converter).
* Named numpy generator streams for everything that only needs
  within-platform reproducibility (weight init, dropout, shuffling).
"""

from __future__ import annotations

import zlib

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Return outputs ``start .. start+count`` of the SplitMix64 stream for ``seed``.

    Output ``k`` is ``finalize(seed + (k+1)*GAMMA)`` with the standard
    SplitMix64 finalizer, i.e. a pure function of (seed, k).
    """
    with np.errstate(over="ignore"):
        ctr = (np.arange(start, start + count, dtype=np.uint64) + _U64(1)) * _GAMMA
        z = ctr + _U64(seed & 0xFFFFFFFFFFFFFFFF)
        z = (z ^ (z >> _U64(30))) * _MIX1
        z = (z ^ (z >> _U64(27))) * _MIX2
        z = z ^ (z >> _U64(31))
    return z


def uniform53(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles in [0, 1) with full 53-bit resolution."""
    return (splitmix64(seed, start, count) >> _U64(11)).astype(np.float64) * 2.0**-53


def uniform_open(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles in (0, 1]; safe under log()."""
    bits = (splitmix64(seed, start, count) >> _U64(11)).astype(np.float64)
    return (bits + 1.0) * 2.0**-53


def normal(seed: int, start: int, count: int, std: float = 1.0) -> np.ndarray:
    """Normal deviates via Box-Muller over the counter stream.

    Deviate ``k`` consumes counters ``2k`` and ``2k+1``, so slices of the
    stream are position-stable regardless of chunking.
    """
    raw = splitmix64(seed, 2 * start, 2 * count) >> _U64(11)
    u1 = (raw[0::2].astype(np.float64) + 1.0) * 2.0**-53  # (0, 1], log-safe
    u2 = raw[1::2].astype(np.float64) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u1))
    return std * r * np.cos(2.0 * np.pi * u2)


def uniform_f32(seed: int, start: int, count: int, scale: float) -> np.ndarray:
    """float32 uniforms in [-scale, scale] built only from dyadic arithmetic.

    Every step (24-bit integer -> exact float32, subtract 0.5, double,
    single rounding when multiplying by ``scale``) is IEEE-exact or
    single-rounded, so any language reproduces identical bit patterns.
    """
    bits = (splitmix64(seed, start, count) >> _U64(40)).astype(np.float32)
    centered = bits * np.float32(2.0**-24) - np.float32(0.5)
    return centered * np.float32(2.0) * np.float32(scale)


def stream(seed: int, name: str) -> np.random.Generator:
    """Named numpy generator stream derived from (seed, crc32(name))."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & 0xFFFFFFFF, zlib.crc32(name.encode())])))
