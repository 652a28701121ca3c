"""Meta-learning recommender for bibliographic reference parsers."""
from ._parsrec import (
    class_sequence,
    evaluate,
    extract_heuristics,
    generate_corpus,
    normalize_value,
    parse,
    parse_with_model,
    parser_ids,
    recommend,
    tokenize,
    train,
)

__all__ = [
    "class_sequence",
    "evaluate",
    "extract_heuristics",
    "generate_corpus",
    "normalize_value",
    "parse",
    "parse_with_model",
    "parser_ids",
    "recommend",
    "tokenize",
    "train",
]
