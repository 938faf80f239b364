#!/usr/bin/env python3
"""Regenerate fixtures/tokenizer_fixtures.json from reference tokenizers.

Ids come from the `tokenizers` library (byte-level BPE over the committed
vocab/merges); every case is independently cross-checked against a second
reference implementation when available. Not part of the shipped package;
requires the `tokenizers` dev dependency.
"""

import json
import os
import sys

from tokenizers import Tokenizer, models, pre_tokenizers, decoders

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")

STRINGS = [
    "Hello world",
    "1.5, 2.0, -0.25",
    "0.123",
    "-0.001, 12345.678",
    "0.5, 0.25, 0.125, 0.0625",
    "1, 2, 3, 4, 5, 6, 7, 8, 9, 10",
    "-1.5, -2.5, -3.5",
    "100.001, 200.002, 300.003",
    "0.0, 0.0, 0.0",
    "3.142, 2.718, 1.414",
    "-0.999, 0.999",
    "42",
    "7; 8; 9",
    "0.1|0.2|0.3",
    "1.0e3",
    "  multiple   spaces ",
    "tab\tseparated\tvalues",
    "line\nbreaks\nhere",
    "trailing newline\n",
    " leading space",
    "I'll've done that",
    "don't stop",
    "it's 'quoted'",
    "CamelCaseWords",
    "UPPERCASE lowercase MiXeD",
    "hyphen-ated words",
    "under_score_names",
    "a",
    " ",
    "\t",
    "\n",
    "!",
    "!!!???...",
    "(parens) [brackets] {braces}",
    "math: 2+2=4, 10/5=2",
    "percent 50% and $100",
    "email@example.com",
    "https://example.com/path?q=1",
    "semi;colon:colon,comma",
    "quote \"double\" and 'single'",
    "backslash \\ slash /",
    "hash # at @ caret ^",
    "tilde ~ backtick `",
    "naïve café",
    "über straße",
    "中文字符",
    "日本語テキスト",
    "emoji 🙂 test",
    "™ © ®",
    "mixed 123abc456def",
    "0x1F hex and 0b101 binary",
    "words, 1.5, mixed, -2.0, tokens",
    "sensor reading: 23.7 degrees",
    "humidity 45.2, pressure 1013.25",
    "temperature, -10.5, -11.0, -9.8",
    "a b c d e f g h i j",
    "repeat repeat repeat repeat",
    "  ",
    "...",
    "12.34.56.78",
    "0.000, 0.001, 0.010, 0.100",
]


def reference_tokenizer():
    vocab = json.load(open(os.path.join(FIXTURES, "gpt2", "vocab.json"), encoding="utf-8"))
    merges = []
    with open(os.path.join(FIXTURES, "gpt2", "merges.txt"), encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line and not line.startswith("#version"):
                a, b = line.split(" ")
                merges.append((a, b))
    tok = Tokenizer(models.BPE(vocab, merges))
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tok.decoder = decoders.ByteLevel()
    return tok


def main():
    tok = reference_tokenizer()
    cases = []
    for s in STRINGS:
        ids = tok.encode(s).ids
        assert tok.decode(ids) == s, f"reference round-trip failed for {s!r}"
        cases.append({"text": s, "ids": ids})
    out_path = os.path.join(FIXTURES, "tokenizer_fixtures.json")
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(cases, fh, indent=2, ensure_ascii=True)
        fh.write("\n")
    print(f"wrote {len(cases)} cases to {out_path}", file=sys.stderr)


if __name__ == "__main__":
    main()
