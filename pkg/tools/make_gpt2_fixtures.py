#!/usr/bin/env python3
"""Regenerate fixtures/forward/ hidden-state parity cases.

The reference forward pass is implemented here in torch (float64),
independently of the package's numpy path; weights come from the shared
deterministic generator so nothing large needs committing. Each case
stores its token ids in meta.json and final hidden states as row-major
little-endian float32. Dev-only; requires torch.
"""

import json
import os
import sys

import numpy as np
import torch

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "src"))

from deepfeat.llm.synthetic import synthetic_tensors  # noqa: E402
from deepfeat.llm.bpe import BpeVocab, bpe_tokenize  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")
WEIGHT_SEED = 2026

N_HEAD, HEAD_DIM, N_LAYER = 12, 64, 12

CASE_TEXTS = {
    "hello": "Hello world",
    "series_short": "1.5, 2.0, -0.25",
    "series_neg": "-0.001, 12345.678",
    "mixed_text": " I'll've done\tthat 123x",
    "numeric_32": "0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8",
}


def torch_forward(ids, tensors):
    w = {k: torch.from_numpy(v.astype(np.float64)) for k, v in tensors.items()}
    t_len = len(ids)
    x = w["wte"][torch.tensor(ids)] + w["wpe"][:t_len]
    mask = torch.triu(torch.full((t_len, t_len), float("-inf"), dtype=torch.float64), diagonal=1)
    for i in range(N_LAYER):
        p = f"h{i}."
        h = torch.nn.functional.layer_norm(x, (768,), w[p + "ln_1.g"], w[p + "ln_1.b"], eps=1e-5)
        qkv = h @ w[p + "attn.qkv.w"] + w[p + "attn.qkv.b"]
        q, k, v = qkv.split(768, dim=-1)
        q = q.view(t_len, N_HEAD, HEAD_DIM).transpose(0, 1)
        k = k.view(t_len, N_HEAD, HEAD_DIM).transpose(0, 1)
        v = v.view(t_len, N_HEAD, HEAD_DIM).transpose(0, 1)
        att = torch.softmax(q @ k.transpose(-2, -1) / HEAD_DIM**0.5 + mask, dim=-1)
        y = (att @ v).transpose(0, 1).reshape(t_len, 768)
        x = x + y @ w[p + "attn.proj.w"] + w[p + "attn.proj.b"]
        h = torch.nn.functional.layer_norm(x, (768,), w[p + "ln_2.g"], w[p + "ln_2.b"], eps=1e-5)
        inner = torch.nn.functional.gelu(h @ w[p + "mlp.fc.w"] + w[p + "mlp.fc.b"], approximate="tanh")
        x = x + inner @ w[p + "mlp.proj.w"] + w[p + "mlp.proj.b"]
    x = torch.nn.functional.layer_norm(x, (768,), w["ln_f.g"], w["ln_f.b"], eps=1e-5)
    return x.numpy().astype("<f4")


def main():
    out_dir = os.path.join(FIXTURES, "forward")
    os.makedirs(out_dir, exist_ok=True)
    vocab = BpeVocab.load(os.path.join(FIXTURES, "gpt2", "vocab.json"), os.path.join(FIXTURES, "gpt2", "merges.txt"))
    tensors = synthetic_tensors(WEIGHT_SEED)
    meta = {"weights": {"generator": "splitmix64-uniform-f32", "seed": WEIGHT_SEED}, "cases": []}
    for name, text in CASE_TEXTS.items():
        ids = bpe_tokenize(text, vocab)
        assert 1 <= len(ids) <= 32, (name, len(ids))
        hidden = torch_forward(ids, tensors)
        blob = os.path.join(out_dir, f"{name}.hidden.bin")
        with open(blob, "wb") as fh:
            fh.write(hidden.tobytes())
        meta["cases"].append({"name": name, "text": text, "ids": ids, "rows": hidden.shape[0], "dim": hidden.shape[1]})
        print(f"{name}: {len(ids)} tokens, |h| max {abs(hidden).max():.3f}", file=sys.stderr)
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, ensure_ascii=True)
        fh.write("\n")
    print(f"wrote {len(meta['cases'])} cases to {out_dir}", file=sys.stderr)


if __name__ == "__main__":
    main()
