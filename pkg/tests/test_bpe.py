"""Tokenizer parity with the checked-in reference fixtures, plus round-trip properties."""

import json
import os
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepfeat.llm import BpeVocab, bpe_detokenize, bpe_tokenize, tokenize_with_pieces

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


@pytest.fixture(scope="module")
def vocab():
    return BpeVocab.load(os.path.join(FIXTURES, "gpt2", "vocab.json"), os.path.join(FIXTURES, "gpt2", "merges.txt"))


@pytest.fixture(scope="module")
def fixture_cases():
    return json.load(open(os.path.join(FIXTURES, "tokenizer_fixtures.json"), encoding="utf-8"))


class TestFixtureParity:
    def test_at_least_fifty_cases(self, fixture_cases):
        assert len(fixture_cases) >= 50

    def test_all_fixtures_match_exactly(self, vocab, fixture_cases):
        for case in fixture_cases:
            assert bpe_tokenize(case["text"], vocab) == case["ids"], repr(case["text"])

    def test_all_fixtures_round_trip(self, vocab, fixture_cases):
        for case in fixture_cases:
            assert bpe_detokenize(case["ids"], vocab) == case["text"]

    def test_known_ids(self, vocab):
        assert bpe_tokenize("Hello world", vocab) == [15496, 995]


class TestVocab:
    def test_size(self, vocab):
        assert len(vocab) == 50257

    def test_byte_table_covers_all_bytes(self, vocab):
        assert sorted(vocab.byte_encoder.keys()) == list(range(256))
        assert len(set(vocab.byte_encoder.values())) == 256

    def test_bad_vocab_rejected(self):
        with pytest.raises(ValueError):
            BpeVocab(token_to_id={"a": 0, "b": 2}, merges=[])


class TestRoundTrip:
    @settings(max_examples=300, deadline=None)
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=60))
    def test_ascii_round_trip(self, vocab, s):
        assert bpe_detokenize(bpe_tokenize(s, vocab), vocab) == s

    def test_bulk_random_ascii(self, vocab):
        import random

        rnd = random.Random(123)
        chars = string.printable
        for _ in range(10_000):
            s = "".join(rnd.choice(chars) for _ in range(rnd.randint(0, 24)))
            assert bpe_detokenize(bpe_tokenize(s, vocab), vocab) == s

    def test_unicode_round_trip(self, vocab):
        for s in ["ラーメン 🍜", "déjà vu", "Ωμέγα", "\x00\x01\x7f"]:
            assert bpe_detokenize(bpe_tokenize(s, vocab), vocab) == s

    def test_empty(self, vocab):
        assert bpe_tokenize("", vocab) == []
        assert bpe_detokenize([], vocab) == ""

    def test_single_id_round_trips(self, vocab):
        assert bpe_detokenize([15496], vocab) == "Hello"

    def test_out_of_range_id(self, vocab):
        with pytest.raises(IndexError):
            bpe_detokenize([50257], vocab)


class TestPieces:
    def test_piece_token_counts_sum(self, vocab):
        text = "12.5, -3.25, sensor; ok"
        ids, pieces = tokenize_with_pieces(text, vocab)
        assert sum(n for _, _, n in pieces) == len(ids)
        assert ids == bpe_tokenize(text, vocab)

    def test_piece_spans_tile_text(self, vocab):
        text = " 1.5, 2.0  and words"
        _, pieces = tokenize_with_pieces(text, vocab)
        assert pieces[0][0] == 0
        for (s1, e1, _), (s2, e2, _) in zip(pieces, pieces[1:]):
            assert e1 == s2
        assert pieces[-1][1] == len(text)
