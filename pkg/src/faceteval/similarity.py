"""Sentence similarity measures used to build machine FAMs."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import rouge


class Measure(str, Enum):
    ROUGE1_F1 = "rouge1_f1"
    ROUGE2_F1 = "rouge2_f1"
    ROUGEL_RECALL = "rougeL_recall"
    ROUGEL_PRECISION = "rougeL_precision"
    ROUGEL_F1 = "rougeL_f1"
    ROUGE_AVG_F1 = "rouge_avg_f1"
    TFIDF_COSINE = "tfidf_cosine"


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: tuple[float, ...]

    def weight(self, token: str) -> float:
        idx = self.vocabulary.get(token)
        return 0.0 if idx is None else self.idf[idx]

    def vectorize(self, tokens: Sequence[str]) -> dict[int, float]:
        """Sparse raw-count x idf vector; out-of-vocabulary tokens are dropped."""
        vec: dict[int, float] = {}
        for tok, count in Counter(tokens).items():
            idx = self.vocabulary.get(tok)
            if idx is not None:
                vec[idx] = count * self.idf[idx]
        return vec


def fit_tfidf(sentences: Sequence[Sequence[str]]) -> TfIdfModel:
    """Fit idf weights treating every sentence as one pseudo-document.

    ``idf(t) = ln((1 + S) / (1 + df(t))) + 1`` with ``S`` the sentence count.
    Vocabulary indices follow sorted token order.
    """
    if not any(sentences):
        raise ValueError("fit_tfidf needs at least one non-empty sentence")
    df: Counter = Counter()
    for sent in sentences:
        df.update(set(sent))
    n = len(sentences)
    vocab = {tok: i for i, tok in enumerate(sorted(df))}
    idf = tuple(math.log((1 + n) / (1 + df[tok])) + 1 for tok in sorted(df))
    return TfIdfModel(vocab, idf)


def tfidf_cosine(model: TfIdfModel, a: Sequence[str], b: Sequence[str]) -> float:
    va, vb = model.vectorize(a), model.vectorize(b)
    if not va or not vb:
        return 0.0
    dot = sum(w * vb.get(i, 0.0) for i, w in va.items())
    na = math.sqrt(sum(w * w for w in va.values()))
    nb = math.sqrt(sum(w * w for w in vb.values()))
    return min(1.0, max(0.0, dot / (na * nb)))


def score(
    measure: Measure | str,
    candidate: Sequence[str],
    reference: Sequence[str],
    model: TfIdfModel | None = None,
) -> float:
    """Similarity of a candidate (document) sentence to a reference (facet) sentence."""
    measure = Measure(measure)
    if measure is Measure.ROUGE1_F1:
        return rouge.rouge_n(candidate, reference, 1).f1
    if measure is Measure.ROUGE2_F1:
        return rouge.rouge_n(candidate, reference, 2).f1
    if measure is Measure.ROUGEL_RECALL:
        return rouge.rouge_l_sentence(candidate, reference).recall
    if measure is Measure.ROUGEL_PRECISION:
        return rouge.rouge_l_sentence(candidate, reference).precision
    if measure is Measure.ROUGEL_F1:
        return rouge.rouge_l_sentence(candidate, reference).f1
    if measure is Measure.ROUGE_AVG_F1:
        return rouge.rouge_avg([candidate], [reference])
    if model is None:
        raise ValueError("tfidf_cosine needs a fitted TfIdfModel")
    return tfidf_cosine(model, candidate, reference)
