"""Facet-aware metrics: FAR, SAR, oracle FAR, redundancy, support P/R/F1 and batch evaluation."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import rouge
from .corpus import DatasetError, Fam, Sample, SystemOutput


class MetricError(ValueError):
    """A metric is undefined for the given input."""


class FacetScope(str, Enum):
    MAPPABLE_ONLY = "mappable"
    ALL_FACETS = "all"


@dataclass
class CoverageResult:
    far: float
    sar: float | None
    covered_facets: int
    scoped_facets: int
    support_hit: int
    support_total: int
    redundant: bool


def _as_set(sample: Sample, extracted: Iterable[int]) -> frozenset[int]:
    extracted = tuple(extracted)
    sample.check_indices(extracted)
    return frozenset(extracted)


def _covered(fam: Fam, extracted: frozenset[int]) -> bool:
    return any(g.as_set <= extracted for g in fam.groups)


def _scoped_fams(sample: Sample, scope: FacetScope) -> list[Fam]:
    if FacetScope(scope) is FacetScope.MAPPABLE_ONLY:
        return [f for f in sample.fams if f.groups]
    return list(sample.fams)


def far(
    sample: Sample,
    extracted: Iterable[int],
    scope: FacetScope | str = FacetScope.MAPPABLE_ONLY,
    normalize: bool = False,
) -> float:
    """Facet-Aware Recall: share of in-scope facets with a support group inside ``extracted``.

    Args:
        sample: Sample with gold FAMs.
        extracted: Extracted document-sentence indices.
        scope: ``mappable`` ignores facets without support groups; ``all``
            counts them as uncovered.
        normalize: Divide by the number of extracted sentences.
    """
    ext = _as_set(sample, extracted)
    fams = _scoped_fams(sample, FacetScope(scope))
    if not fams:
        return 0.0
    value = sum(_covered(f, ext) for f in fams) / len(fams)
    if normalize:
        value = value / len(ext) if ext else 0.0
    return value


def sar(sample: Sample, extracted: Iterable[int]) -> float:
    """Support-Aware Recall: share of the pooled support sentences that were extracted."""
    ext = _as_set(sample, extracted)
    union = sample.support_union
    if not union:
        raise MetricError(f"sample {sample.id!r} has no support sentences; SAR is undefined")
    return len(union & ext) / len(union)


def redundancy(sample: Sample, extracted: Iterable[int]) -> bool:
    """True iff some facet has two or more distinct support groups fully extracted."""
    ext = _as_set(sample, extracted)
    for fam in sample.fams:
        hit = {g.as_set for g in fam.groups if g.as_set <= ext}
        if len(hit) >= 2:
            return True
    return False


def coverage(
    sample: Sample, extracted: Iterable[int], scope: FacetScope | str = FacetScope.MAPPABLE_ONLY
) -> CoverageResult:
    ext = _as_set(sample, extracted)
    fams = _scoped_fams(sample, FacetScope(scope))
    covered = sum(_covered(f, ext) for f in fams)
    union = sample.support_union
    hit = len(union & ext)
    return CoverageResult(
        far=covered / len(fams) if fams else 0.0,
        sar=hit / len(union) if union else None,
        covered_facets=covered,
        scoped_facets=len(fams),
        support_hit=hit,
        support_total=len(union),
        redundant=redundancy(sample, ext),
    )


def oracle_extract(
    sample: Sample, k: int, scope: FacetScope | str = FacetScope.MAPPABLE_ONLY
) -> tuple[tuple[int, ...], float]:
    """Exhaustively find an extraction of at most ``k`` sentences maximizing FAR.

    Only support sentences are candidates, since no other sentence can complete
    a group. Ties go to the lexicographically smallest sorted index tuple.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    pool = sorted(sample.support_union)
    best: tuple[int, ...] = ()
    best_far = far(sample, (), scope)
    for size in range(1, min(k, len(pool)) + 1):
        for combo in combinations(pool, size):
            value = far(sample, combo, scope)
            if value > best_far or (value == best_far and combo < best):
                best, best_far = combo, value
    return best, best_far


def lead_k(sample: Sample, k: int) -> tuple[int, ...]:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return tuple(range(min(k, len(sample.document))))


def support_prf(
    predictions: Mapping[str, Iterable[int]], dataset: Sequence[Sample]
) -> tuple[float, float, float]:
    """Micro precision/recall/F1 of predicted support sets against gold support unions.

    Counts are pooled over the samples present in ``predictions``.
    """
    by_id = {s.id: s for s in dataset}
    tp = n_pred = n_gold = 0
    for sid, pred in predictions.items():
        if sid not in by_id:
            raise DatasetError(f"unknown sample id {sid!r}")
        pred = set(pred)
        gold = by_id[sid].support_union
        tp += len(pred & gold)
        n_pred += len(pred)
        n_gold += len(gold)
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def fam_jaccard(fams_a: Sequence[Fam], fams_b: Sequence[Fam]) -> float:
    """Mean per-facet Jaccard of support unions, skipping facets empty on both sides."""
    if len(fams_a) != len(fams_b):
        raise MetricError(f"facet count mismatch: {len(fams_a)} vs {len(fams_b)}")
    scores = []
    for a, b in zip(fams_a, fams_b):
        sa, sb = a.support, b.support
        if sa or sb:
            scores.append(len(sa & sb) / len(sa | sb))
    return sum(scores) / len(scores) if scores else 0.0


# --- batch evaluation --------------------------------------------------------

ROUGE_KEYS = tuple(f"rouge{v}_{m}" for v in ("1", "2", "L") for m in ("p", "r", "f"))


@dataclass
class ScoreReport:
    system_name: str
    aggregate: dict[str, float]
    per_sample: dict[str, dict] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "system": self.system_name,
            "aggregate": {k: round(v, 4) if isinstance(v, float) else v for k, v in self.aggregate.items()},
            "per_sample": self.per_sample,
        }


def _rouge_row(candidate: list[rouge.TokenSeq], reference: list[rouge.TokenSeq]) -> dict[str, float]:
    scores = {
        "1": rouge.rouge_n_summary(candidate, reference, 1),
        "2": rouge.rouge_n_summary(candidate, reference, 2),
        "L": rouge.rouge_l_summary(candidate, reference),
    }
    row = {}
    for v, s in scores.items():
        row[f"rouge{v}_p"], row[f"rouge{v}_r"], row[f"rouge{v}_f"] = s.precision, s.recall, s.f1
    return row


def _score_one(task) -> dict:
    sample, indices, texts, scope, stemming = task
    reference = sample.reference_tokens(stemming)
    if texts is not None:
        row = _rouge_row([rouge.tokenize(t, stemming) for t in texts], reference)
        row["n_extracted"] = len(texts)
        return row
    doc = sample.document_tokens(stemming)
    row = _rouge_row([doc[i] for i in indices], reference)
    cov = coverage(sample, indices, scope)
    row.update(asdict(cov))
    row["n_extracted"] = len(indices)
    return row


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def evaluate_system(
    dataset: Sequence[Sample],
    system: SystemOutput,
    scope: FacetScope | str = FacetScope.MAPPABLE_ONLY,
    k: int | None = None,
    stemming: bool = False,
    jobs: int = 1,
) -> ScoreReport:
    """Per-sample coverage and ROUGE plus macro averages over samples.

    FAR is averaged over samples with at least one in-scope facet and SAR over
    samples with at least one support sentence. Abstractive (text-only)
    systems get ROUGE columns only.

    Args:
        k: Truncate each extraction to its first ``k`` indices.
        jobs: Worker processes; results are reduced in dataset order.
    """
    scope = FacetScope(scope)
    tasks = []
    for sample in dataset:
        if system.abstractive:
            if sample.id not in system.summaries:
                raise DatasetError(f"system {system.system_name!r} has no output for sample {sample.id!r}")
            texts = system.summaries[sample.id]
            tasks.append((sample, None, texts[:k] if k else texts, scope, stemming))
        else:
            if sample.id not in system.extractions:
                raise DatasetError(f"system {system.system_name!r} has no output for sample {sample.id!r}")
            idx = system.extractions[sample.id]
            tasks.append((sample, idx[:k] if k else idx, None, scope, stemming))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_score_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_score_one(t) for t in tasks]

    per_sample = {s.id: row for s, row in zip(dataset, rows)}
    agg: dict[str, float] = {"n_samples": len(rows)}
    for key in ROUGE_KEYS:
        agg[key] = _mean([r[key] for r in rows])
    if not system.abstractive:
        far_rows = [r for r in rows if r["scoped_facets"]]
        sar_rows = [r for r in rows if r["sar"] is not None]
        agg["far"] = _mean([r["far"] for r in far_rows])
        agg["sar"] = _mean([r["sar"] for r in sar_rows])
        agg["redundancy_rate"] = _mean([float(r["redundant"]) for r in rows])
        agg["n_far_samples"] = len(far_rows)
    return ScoreReport(system.system_name, agg, per_sample)


def lead_system(dataset: Sequence[Sample], k: int) -> SystemOutput:
    return SystemOutput(f"Lead-{k}", {s.id: lead_k(s, k) for s in dataset})


def oracle_system(
    dataset: Sequence[Sample], k: int, scope: FacetScope | str = FacetScope.MAPPABLE_ONLY
) -> SystemOutput:
    return SystemOutput("Oracle", {s.id: oracle_extract(s, k, scope)[0] for s in dataset})
