"""Numeric series -> text serialization for the frozen language-model branch."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SerializationConfig:
    fractional_digits: int = 3
    separator: str = ", "

    def __post_init__(self):
        if self.fractional_digits < 0:
            raise ValueError("fractional_digits must be >= 0")
        if not self.separator:
            raise ValueError("separator must be nonempty")


def format_value(value: float, cfg: SerializationConfig) -> str:
    """Fixed-decimal rendering with trailing zeros trimmed.

    Round-half-to-even at the configured digit count; at least one digit is
    kept on each side of the decimal point: "1.500" -> "1.5", "2.000" ->
    "2.0", "-0.250" -> "-0.25". With fractional_digits = 0 integers render
    bare ("2").
    """
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value!r}")
    text = f"{value:.{cfg.fractional_digits}f}"
    if "." in text:
        whole, frac = text.split(".")
        frac = frac.rstrip("0") or "0"
        text = f"{whole}.{frac}"
        if text == "-0.0":
            text = "0.0"
    elif text == "-0":
        text = "0"
    return text


def serialize_series(values, cfg: SerializationConfig = SerializationConfig()) -> str:
    vals = list(values)
    if not vals:
        raise ValueError("cannot serialize an empty series")
    return cfg.separator.join(format_value(float(v), cfg) for v in vals)


def value_char_spans(values, cfg: SerializationConfig = SerializationConfig()) -> list[tuple[int, int]]:
    """[start, end) character span of each rendered value inside the serialized text."""
    spans = []
    pos = 0
    for i, v in enumerate(values):
        if i > 0:
            pos += len(cfg.separator)
        piece = format_value(float(v), cfg)
        spans.append((pos, pos + len(piece)))
        pos += len(piece)
    return spans
