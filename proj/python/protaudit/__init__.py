"""Python access to the protagonist bias audit core."""

from ._protaudit import (
    ConstantScoreError,
    Error,
    UndefinedCosineError,
    ValidationError,
    annotate_text,
    cosine,
    lower_median,
    run_cli,
    significance_mark,
    split_sentences,
    z_scores,
)

__all__ = [
    "ConstantScoreError",
    "Error",
    "UndefinedCosineError",
    "ValidationError",
    "annotate_text",
    "cosine",
    "lower_median",
    "run_cli",
    "significance_mark",
    "split_sentences",
    "z_scores",
]
