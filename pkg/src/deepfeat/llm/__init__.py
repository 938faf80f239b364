from .serialize import SerializationConfig, format_value, serialize_series, value_char_spans
from .bpe import BpeVocab, bpe_detokenize, bpe_tokenize, tokenize_with_pieces
from .gpt2 import (
    Gpt2Weights,
    gpt2_forward,
    llm_features,
    llm_features_matrix,
    window_token_counts,
    tensor_schema,
)
from .synthetic import synthetic_gpt2_weights, synthetic_tensors
from . import cache

__all__ = [
    "SerializationConfig",
    "format_value",
    "serialize_series",
    "value_char_spans",
    "BpeVocab",
    "bpe_detokenize",
    "bpe_tokenize",
    "tokenize_with_pieces",
    "Gpt2Weights",
    "gpt2_forward",
    "llm_features",
    "llm_features_matrix",
    "window_token_counts",
    "tensor_schema",
    "synthetic_gpt2_weights",
    "synthetic_tensors",
    "cache",
]
