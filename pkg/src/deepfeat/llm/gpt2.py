"""Frozen GPT-2-small forward pass (numpy, inference only).

Pre-norm transformer: 12 blocks of causal self-attention (12 heads of
width 64, scale 1/8) and a GELU MLP, learned absolute positions, final
layer norm. No gradients ever flow into these weights; the branch is a
fixed feature extractor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bpe import BpeVocab, tokenize_with_pieces
from .serialize import SerializationConfig, serialize_series, value_char_spans

N_VOCAB = 50257
N_CTX = 1024
N_EMBD = 768
N_HEAD = 12
N_LAYER = 12
HEAD_DIM = N_EMBD // N_HEAD
LN_EPS = 1e-5

# TSAR tensor names, in canonical generation/serialization order.
BLOCK_FIELDS = (
    ("ln_1.g", (N_EMBD,)),
    ("ln_1.b", (N_EMBD,)),
    ("attn.qkv.w", (N_EMBD, 3 * N_EMBD)),
    ("attn.qkv.b", (3 * N_EMBD,)),
    ("attn.proj.w", (N_EMBD, N_EMBD)),
    ("attn.proj.b", (N_EMBD,)),
    ("ln_2.g", (N_EMBD,)),
    ("ln_2.b", (N_EMBD,)),
    ("mlp.fc.w", (N_EMBD, 4 * N_EMBD)),
    ("mlp.fc.b", (4 * N_EMBD,)),
    ("mlp.proj.w", (4 * N_EMBD, N_EMBD)),
    ("mlp.proj.b", (N_EMBD,)),
)


def tensor_schema() -> list[tuple[str, tuple[int, ...]]]:
    """Every tensor name with its shape, in canonical order."""
    names: list[tuple[str, tuple[int, ...]]] = [("wte", (N_VOCAB, N_EMBD)), ("wpe", (N_CTX, N_EMBD))]
    for i in range(N_LAYER):
        names.extend((f"h{i}.{field}", shape) for field, shape in BLOCK_FIELDS)
    names.append(("ln_f.g", (N_EMBD,)))
    names.append(("ln_f.b", (N_EMBD,)))
    return names


@dataclass
class Gpt2Weights:
    tensors: dict[str, np.ndarray]

    def __post_init__(self):
        for name, shape in tensor_schema():
            if name not in self.tensors:
                raise ValueError(f"missing tensor {name!r}")
            got = self.tensors[name].shape
            if tuple(got) != shape:
                raise ValueError(f"tensor {name!r} has shape {got}, expected {shape}")
            if not np.all(np.isfinite(self.tensors[name])):
                raise ValueError(f"tensor {name!r} contains non-finite values")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    @classmethod
    def from_tsar(cls, path: str) -> "Gpt2Weights":
        from .. import tsar

        return cls(tsar.read(path))


def _layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    return g * (xc / np.sqrt(var + LN_EPS)) + b


def _gelu(x: np.ndarray) -> np.ndarray:
    # tanh approximation, matching the published checkpoint's activation;
    # x*x*x instead of x**3 keeps numpy off its slow pow path
    z = x.dtype.type(np.sqrt(2.0 / np.pi)) * (x + x.dtype.type(0.044715) * (x * x * x))
    return 0.5 * x * (1.0 + np.tanh(z))


def _forward_batch(ids: np.ndarray, weights: Gpt2Weights) -> np.ndarray:
    """Hidden states [B, T, 768] for right-padded id rows.

    Causal masking makes each row's states independent of later positions,
    so right padding never changes the states of real tokens.
    """
    b, t_len = ids.shape
    x = weights["wte"][ids] + weights["wpe"][:t_len]
    mask = np.triu(np.full((t_len, t_len), -np.inf, dtype=x.dtype), k=1)
    scale = np.asarray(1.0 / np.sqrt(HEAD_DIM), dtype=x.dtype)
    for i in range(N_LAYER):
        p = f"h{i}."
        h = _layer_norm(x, weights[p + "ln_1.g"], weights[p + "ln_1.b"])
        qkv = h.reshape(b * t_len, N_EMBD) @ weights[p + "attn.qkv.w"] + weights[p + "attn.qkv.b"]
        qkv = qkv.reshape(b, t_len, 3, N_HEAD, HEAD_DIM)
        q = qkv[:, :, 0].transpose(0, 2, 1, 3) * scale  # [B, H, T, D]; pre-scaled
        k = qkv[:, :, 1].transpose(0, 2, 1, 3)
        v = qkv[:, :, 2].transpose(0, 2, 1, 3)
        att = q @ k.transpose(0, 1, 3, 2)
        att += mask
        att -= att.max(axis=-1, keepdims=True)
        np.exp(att, out=att)
        att /= att.sum(axis=-1, keepdims=True)
        y = (att @ v).transpose(0, 2, 1, 3).reshape(b * t_len, N_EMBD)
        x = x + (y @ weights[p + "attn.proj.w"] + weights[p + "attn.proj.b"]).reshape(b, t_len, N_EMBD)
        h = _layer_norm(x, weights[p + "ln_2.g"], weights[p + "ln_2.b"])
        inner = _gelu(h.reshape(b * t_len, N_EMBD) @ weights[p + "mlp.fc.w"] + weights[p + "mlp.fc.b"])
        x = x + (inner @ weights[p + "mlp.proj.w"] + weights[p + "mlp.proj.b"]).reshape(b, t_len, N_EMBD)
    return _layer_norm(x, weights["ln_f.g"], weights["ln_f.b"])


def gpt2_forward(ids, weights: Gpt2Weights) -> np.ndarray:
    """Final hidden states [T, 768] for a token id sequence, 1 <= T <= 1024."""
    ids = np.asarray(ids, dtype=np.int64)
    t_len = ids.shape[0]
    if t_len == 0:
        raise ValueError("empty token sequence")
    if t_len > N_CTX:
        raise ValueError(f"sequence of {t_len} tokens exceeds the {N_CTX} context")
    if ids.min() < 0 or ids.max() >= N_VOCAB:
        raise ValueError("token id out of range")
    return _forward_batch(ids[None], weights)[0]


def window_token_counts(pieces, value_starts, limit: int = N_CTX) -> list[int]:
    """Split a tokenized series into window sizes of <= limit tokens.

    Windows may only break where a serialized value begins (the piece
    containing a value's first character starts a new cuttable segment).
    A lone segment longer than the limit is split raw as a last resort.
    """
    cut_tokens: list[int] = []
    token_pos = 0
    starts = set(value_starts)
    for char_start, char_end, n_tok in pieces:
        if any(char_start <= s < char_end for s in starts) and token_pos > 0:
            cut_tokens.append(token_pos)
        token_pos += n_tok
    total = token_pos
    segments = []
    prev = 0
    for c in cut_tokens + [total]:
        if c > prev:
            segments.append(c - prev)
            prev = c
    windows: list[int] = []
    current = 0
    for seg in segments:
        if seg > limit:
            if current:
                windows.append(current)
                current = 0
            while seg > limit:
                windows.append(limit)
                seg -= limit
            current = seg
        elif current + seg > limit:
            windows.append(current)
            current = seg
        else:
            current += seg
    if current:
        windows.append(current)
    return windows


def llm_features(
    series,
    cfg: SerializationConfig,
    vocab: BpeVocab,
    weights: Gpt2Weights,
) -> np.ndarray:
    """Serialize, tokenize, run windowed forward passes, average-pool to [768].

    Pooling is the arithmetic mean over the concatenation of all windows'
    hidden-state rows, i.e. window means weighted by their row counts.
    """
    values = list(series)
    text = serialize_series(values, cfg)
    ids, pieces = tokenize_with_pieces(text, vocab)
    value_starts = [s for s, _ in value_char_spans(values, cfg)]
    counts = window_token_counts(pieces, value_starts)
    assert sum(counts) == len(ids)
    total = np.zeros(N_EMBD, dtype=np.float64)
    offset = 0
    for count in counts:
        hidden = gpt2_forward(ids[offset : offset + count], weights)
        total += hidden.sum(axis=0, dtype=np.float64)
        offset += count
    return (total / len(ids)).astype(np.float32)


def _series_windows(series, cfg: SerializationConfig, vocab: BpeVocab) -> list[np.ndarray]:
    values = list(series)
    text = serialize_series(values, cfg)
    ids, pieces = tokenize_with_pieces(text, vocab)
    starts = [s for s, _ in value_char_spans(values, cfg)]
    counts = window_token_counts(pieces, starts)
    out = []
    offset = 0
    for c in counts:
        out.append(np.asarray(ids[offset : offset + c], dtype=np.int64))
        offset += c
    return out


def llm_features_matrix(
    series_list,
    cfg: SerializationConfig,
    vocab: BpeVocab,
    weights: Gpt2Weights,
    batch_tokens: int = 4096,
    progress=None,
) -> np.ndarray:
    """llm_features over many samples, batching windows for throughput.

    Windows are greedily grouped (longest first) under a token budget,
    right-padded and run together; padded rows are dropped before pooling,
    so the result matches the per-sample path up to float reassociation.
    """
    jobs: list[tuple[int, np.ndarray]] = []
    totals = np.zeros((len(series_list), N_EMBD), dtype=np.float64)
    row_counts = np.zeros(len(series_list), dtype=np.int64)
    for si, series in enumerate(series_list):
        for win in _series_windows(series, cfg, vocab):
            jobs.append((si, win))
            row_counts[si] += win.size
    jobs.sort(key=lambda j: -j[1].size)
    pos = 0
    done = 0
    while pos < len(jobs):
        t_max = jobs[pos][1].size
        width = max(1, batch_tokens // t_max)
        group = jobs[pos : pos + width]
        padded = np.zeros((len(group), t_max), dtype=np.int64)
        for r, (_, win) in enumerate(group):
            padded[r, : win.size] = win
        hidden = _forward_batch(padded, weights)
        for r, (si, win) in enumerate(group):
            totals[si] += hidden[r, : win.size].sum(axis=0, dtype=np.float64)
        pos += width
        done += width
        if progress:
            progress(done, len(jobs))
    return (totals / row_counts[:, None]).astype(np.float32)
