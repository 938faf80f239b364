"""Byte-level BPE tokenizer over the published 50,257-token vocabulary.

Pipeline: regex pre-split -> UTF-8 bytes -> reversible byte-to-unicode
alphabet -> iterated lowest-rank pair merges -> id lookup. Byte-level
coverage makes tokenization total and exactly invertible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import regex

# The published pre-split pattern: contractions, optionally space-prefixed
# letter/number/punctuation runs, then whitespace (a run followed by a
# non-space keeps its last space attached to the next piece).
PRETOKEN_PATTERN = regex.compile(r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+""")


def byte_to_unicode() -> dict[int, str]:
    """Map every byte to a printable unicode char (the reversible alphabet)."""
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(ord("¡"), ord("¬") + 1)) + list(range(ord("®"), ord("ÿ") + 1))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


@dataclass
class BpeVocab:
    token_to_id: dict[str, int]
    merges: list[tuple[str, str]]
    byte_encoder: dict[int, str] = field(default_factory=byte_to_unicode)

    def __post_init__(self):
        ids = set(self.token_to_id.values())
        if ids != set(range(len(self.token_to_id))):
            raise ValueError("token ids must be a bijection onto [0, vocab size)")
        self.id_to_token = [""] * len(self.token_to_id)
        for tok, i in self.token_to_id.items():
            self.id_to_token[i] = tok
        self.merge_ranks = {pair: rank for rank, pair in enumerate(self.merges)}
        self.byte_decoder = {c: b for b, c in self.byte_encoder.items()}
        self._cache: dict[str, list[int]] = {}

    def __len__(self) -> int:
        return len(self.token_to_id)

    @classmethod
    def load(cls, vocab_path: str, merges_path: str) -> "BpeVocab":
        token_to_id = json.load(open(vocab_path, encoding="utf-8"))
        merges = []
        with open(merges_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#version"):
                    continue
                a, b = line.split(" ")
                merges.append((a, b))
        return cls(token_to_id=token_to_id, merges=merges)


def _merge_piece(piece: str, vocab: BpeVocab) -> list[int]:
    """Apply lowest-rank-first merges to one pre-token (already byte-mapped)."""
    cached = vocab._cache.get(piece)
    if cached is not None:
        return cached
    word = tuple(piece)
    while len(word) > 1:
        best_rank = None
        best_pair = None
        for pair in zip(word, word[1:]):
            rank = vocab.merge_ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = pair
        if best_pair is None:
            break
        a, b = best_pair
        merged = []
        i = 0
        while i < len(word):
            if i < len(word) - 1 and word[i] == a and word[i + 1] == b:
                merged.append(a + b)
                i += 2
            else:
                merged.append(word[i])
                i += 1
        word = tuple(merged)
    ids = [vocab.token_to_id[t] for t in word]
    vocab._cache[piece] = ids
    return ids


def bpe_tokenize(text: str, vocab: BpeVocab) -> list[int]:
    ids: list[int] = []
    for piece in PRETOKEN_PATTERN.findall(text):
        mapped = "".join(vocab.byte_encoder[b] for b in piece.encode("utf-8"))
        ids.extend(_merge_piece(mapped, vocab))
    return ids


def tokenize_with_pieces(text: str, vocab: BpeVocab) -> tuple[list[int], list[tuple[int, int, int]]]:
    """Token ids plus per-piece (char_start, char_end, token_count).

    Merges never cross pre-split pieces, so piece boundaries are the only
    places a forward-pass window may cut.
    """
    ids: list[int] = []
    pieces: list[tuple[int, int, int]] = []
    for m in PRETOKEN_PATTERN.finditer(text):
        mapped = "".join(vocab.byte_encoder[b] for b in m.group().encode("utf-8"))
        piece_ids = _merge_piece(mapped, vocab)
        pieces.append((m.start(), m.end(), len(piece_ids)))
        ids.extend(piece_ids)
    return ids, pieces


def bpe_detokenize(ids, vocab: BpeVocab) -> str:
    chars = []
    for i in ids:
        if not 0 <= i < len(vocab.id_to_token):
            raise IndexError(f"token id {i} out of range")
        chars.append(vocab.id_to_token[i])
    data = bytes(vocab.byte_decoder[c] for c in "".join(chars))
    return data.decode("utf-8")
