"""Extractive bug-report summarization: Python surface over the C++ core."""

import json as _json

from ._core import (
    Corpus,
    DataError,
    NumericError,
    UsageError,
    build_benchmark,
    f_score,
    fisher_score,
    loo_eval_json,
    porter_stem,
    precision,
    preprocess,
    recall,
    segment_sentences,
    spearman,
    tokenize,
    train_model,
    wilcoxon,
)

__all__ = [
    "Corpus",
    "DataError",
    "NumericError",
    "UsageError",
    "build_benchmark",
    "f_score",
    "fisher_score",
    "loo_eval",
    "loo_eval_json",
    "porter_stem",
    "precision",
    "preprocess",
    "recall",
    "segment_sentences",
    "spearman",
    "summarize",
    "tokenize",
    "train_model",
    "wilcoxon",
]


def summarize(corpus, report_id, **kwargs):
    """Summarize one report of a :class:`Corpus`; returns a dict."""
    return _json.loads(corpus.summarize_json(report_id, **kwargs))


def loo_eval(corpus_path, annotations_path, methods, **kwargs):
    """Leave-one-out evaluation; returns the report as a dict."""
    return _json.loads(loo_eval_json(corpus_path, annotations_path, methods, **kwargs))
