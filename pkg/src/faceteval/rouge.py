"""From-scratch ROUGE: tokenization, clipped n-gram overlap, and LCS-based ROUGE-L.

Token sequences are plain tuples of lowercase strings. Multi-sentence inputs are
lists of token tuples; n-grams never cross a sentence boundary.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

TokenSeq = tuple[str, ...]

_PUNCT = string.punctuation + "‘’“”–—…«»"


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, hits: int, candidate_total: int, reference_total: int) -> "RougeScore":
        """Build a score from a hit count; zero denominators give 0."""
        p = hits / candidate_total if candidate_total else 0.0
        r = hits / reference_total if reference_total else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f)


@lru_cache(maxsize=1)
def _stemmer():
    from nltk.stem.porter import PorterStemmer

    return PorterStemmer()


@lru_cache(maxsize=200_000)
def tokenize(text: str, stemming: bool = False) -> TokenSeq:
    """Lowercase, split on whitespace, strip edge punctuation, drop empties.

    Args:
        text: Raw sentence text.
        stemming: Apply the Porter suffix-stripping stemmer to every token.

    Returns:
        Tuple of tokens (empty for empty or punctuation-only input).
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(_PUNCT)
        if tok:
            tokens.append(tok)
    if stemming:
        stem = _stemmer().stem
        tokens = [stem(t) for t in tokens]
    return tuple(tokens)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _sentence_ngrams(sentences: Sequence[Sequence[str]], n: int) -> Counter:
    counts: Counter = Counter()
    for sent in sentences:
        counts.update(ngrams(sent, n))
    return counts


def _overlap(cand: Counter, ref: Counter) -> RougeScore:
    hits = sum((cand & ref).values())
    return RougeScore.from_counts(hits, sum(cand.values()), sum(ref.values()))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap between two token sequences."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _overlap(ngrams(candidate, n), ngrams(reference, n))


def rouge_n_summary(
    candidate_sentences: Sequence[Sequence[str]],
    reference_sentences: Sequence[Sequence[str]],
    n: int,
) -> RougeScore:
    """ROUGE-N over sentence lists; n-grams are counted within each sentence only."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _overlap(_sentence_ngrams(candidate_sentences, n), _sentence_ngrams(reference_sentences, n))


def _lcs_table(a: Sequence[str], b: Sequence[str]) -> list[list[int]]:
    rows, cols = len(a), len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        ai = a[i - 1]
        prev, cur = table[i - 1], table[i]
        for j in range(1, cols + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
    return table


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (dynamic programming)."""
    if not a or not b:
        return 0
    return _lcs_table(a, b)[len(a)][len(b)]


def _lcs_positions(reference: Sequence[str], candidate: Sequence[str]) -> set[int]:
    """Reference positions taking part in one LCS with the candidate."""
    table = _lcs_table(reference, candidate)
    i, j = len(reference), len(candidate)
    hits: set[int] = set()
    while i > 0 and j > 0:
        if reference[i - 1] == candidate[j - 1]:
            hits.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


def rouge_l_sentence(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    return RougeScore.from_counts(lcs_length(candidate, reference), len(candidate), len(reference))


def rouge_l_summary(
    candidate_sentences: Sequence[Sequence[str]],
    reference_sentences: Sequence[Sequence[str]],
) -> RougeScore:
    """Summary-level ROUGE-L with union-LCS hits clipped by token counts.

    For every reference sentence, the reference tokens matched by an LCS against
    each candidate sentence are unioned. A unioned token only counts as a hit
    while both the candidate and reference still have unused copies of it.
    """
    ref_total = sum(len(s) for s in reference_sentences)
    cand_total = sum(len(s) for s in candidate_sentences)
    if not ref_total or not cand_total:
        return RougeScore(0.0, 0.0, 0.0)

    ref_counts = Counter(t for s in reference_sentences for t in s)
    cand_counts = Counter(t for s in candidate_sentences for t in s)
    hits = 0
    for ref in reference_sentences:
        union: set[int] = set()
        for cand in candidate_sentences:
            union |= _lcs_positions(ref, cand)
        for pos in sorted(union):
            tok = ref[pos]
            if ref_counts[tok] > 0 and cand_counts[tok] > 0:
                hits += 1
                ref_counts[tok] -= 1
                cand_counts[tok] -= 1
    return RougeScore.from_counts(hits, cand_total, ref_total)


def rouge_avg(
    candidate_sentences: Sequence[Sequence[str]],
    reference_sentences: Sequence[Sequence[str]],
) -> float:
    """Mean of ROUGE-1, ROUGE-2 and ROUGE-L F1."""
    r1 = rouge_n_summary(candidate_sentences, reference_sentences, 1).f1
    r2 = rouge_n_summary(candidate_sentences, reference_sentences, 2).f1
    rl = rouge_l_summary(candidate_sentences, reference_sentences).f1
    return (r1 + r2 + rl) / 3
