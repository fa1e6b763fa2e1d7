"""Sentence-regression labelers that create machine FAMs from document/reference pairs."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import rouge
from .corpus import Fam, Sample, SupportGroup
from .similarity import Measure, TfIdfModel, fit_tfidf, score

GREEDY, TOPN, LEAD = "greedy_rouge1", "per_facet_topn", "lead_k"

# CLI method name -> (strategy, measure)
METHODS = {
    "greedy-rouge1": (GREEDY, None),
    "lead": (LEAD, None),
    "tfidf": (TOPN, Measure.TFIDF_COSINE),
    "rouge1-f1": (TOPN, Measure.ROUGE1_F1),
    "rouge2-f1": (TOPN, Measure.ROUGE2_F1),
    "rougel-recall": (TOPN, Measure.ROUGEL_RECALL),
    "rougel-precision": (TOPN, Measure.ROUGEL_PRECISION),
    "rougel-f1": (TOPN, Measure.ROUGEL_F1),
    "rouge-avg-f1": (TOPN, Measure.ROUGE_AVG_F1),
}


@dataclass(frozen=True)
class LabelerConfig:
    strategy: str
    measure: Measure | None = None
    top_n: int = 1
    k: int = 3
    tfidf_scope: str = "document+reference"
    stemming: bool = False

    def __post_init__(self):
        if self.strategy not in (GREEDY, TOPN, LEAD):
            raise ValueError(f"unknown labeling strategy {self.strategy!r}")
        if self.top_n < 1 or self.k < 1:
            raise ValueError("top_n and k must be >= 1")
        if (self.measure is not None) != (self.strategy == TOPN):
            raise ValueError("a similarity measure is required exactly for per_facet_topn")
        if self.measure is not None:
            object.__setattr__(self, "measure", Measure(self.measure))
        if self.tfidf_scope not in ("document", "document+reference"):
            raise ValueError(f"unknown tfidf scope {self.tfidf_scope!r}")

    @classmethod
    def from_method(cls, method: str, top_n: int = 1, k: int = 3, **kwargs) -> "LabelerConfig":
        name = method.lower()
        if name.startswith("lead-") and name[5:].isdigit():
            name, k = "lead", int(name[5:])
        if name not in METHODS:
            raise ValueError(f"unknown labeling method {method!r}; choose from {sorted(METHODS)}")
        strategy, measure = METHODS[name]
        return cls(strategy, measure, top_n, k, **kwargs)

    @property
    def label(self) -> str:
        if self.strategy == GREEDY:
            return "greedy-rouge1"
        if self.strategy == LEAD:
            return f"lead-{self.k}"
        name = next(m for m, (_, meas) in METHODS.items() if meas == self.measure)
        return f"{name}@{self.top_n}"


def greedy_select(document: Sequence[rouge.TokenSeq], reference: Sequence[rouge.TokenSeq]) -> list[int]:
    """Greedily add the sentence that most raises ROUGE-1 F1 against the whole reference.

    Stops as soon as no remaining sentence strictly improves the score; ties go
    to the lowest index.
    """
    selected: list[int] = []
    best = 0.0
    remaining = list(range(len(document)))
    while remaining:
        cand_idx, cand_score = -1, best
        for i in remaining:
            value = rouge.rouge_n_summary([document[j] for j in selected] + [document[i]], reference, 1).f1
            if value > cand_score:
                cand_idx, cand_score = i, value
        if cand_idx < 0:
            break
        selected.append(cand_idx)
        remaining.remove(cand_idx)
        best = cand_score
    return selected


def per_facet_rank(
    document: Sequence[rouge.TokenSeq],
    facet: rouge.TokenSeq,
    measure: Measure | str,
    model: TfIdfModel | None = None,
) -> list[int]:
    """Document indices by descending similarity to ``facet``; ties by index."""
    scores = [score(measure, sent, facet, model) for sent in document]
    return sorted(range(len(document)), key=lambda i: (-scores[i], i))


def _tfidf_model(sample: Sample, config: LabelerConfig) -> TfIdfModel:
    sentences = sample.document_tokens(config.stemming)
    if config.tfidf_scope == "document+reference":
        sentences = sentences + sample.reference_tokens(config.stemming)
    return fit_tfidf(sentences)


def make_machine_fams(sample: Sample, config: LabelerConfig) -> tuple[Fam, ...]:
    """Machine FAMs for every facet of ``sample``, in the gold FAM shape."""
    doc = sample.document_tokens(config.stemming)
    if config.strategy == LEAD:
        group = (SupportGroup(tuple(range(min(config.k, len(doc))))),)
        return tuple(Fam(group) for _ in sample.reference)
    if config.strategy == GREEDY:
        chosen = greedy_select(doc, sample.reference_tokens(config.stemming))
        groups = (SupportGroup(tuple(chosen)),) if chosen else ()
        return tuple(Fam(groups) for _ in sample.reference)

    model = _tfidf_model(sample, config) if config.measure is Measure.TFIDF_COSINE else None
    fams = []
    for facet in sample.reference_tokens(config.stemming):
        ranked = per_facet_rank(doc, facet, config.measure, model)
        fams.append(Fam(tuple(SupportGroup((i,)) for i in ranked[: config.top_n])))
    return tuple(fams)


def predicted_support_set(fams: Iterable[Fam]) -> frozenset[int]:
    return frozenset(i for fam in fams for g in fam.groups for i in g.indices)


def _label_one(task) -> tuple[Fam, ...]:
    sample, config = task
    return make_machine_fams(sample, config)


def label_dataset(dataset: Sequence[Sample], config: LabelerConfig, jobs: int = 1) -> list[Sample]:
    """Copies of ``dataset`` whose FAMs are replaced by machine FAMs."""
    tasks = [(s, config) for s in dataset]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            fams = list(pool.map(_label_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        fams = [_label_one(t) for t in tasks]
    return [dataclasses.replace(s, fams=f, explicit_categories=False) for s, f in zip(dataset, fams)]
