"""Documents, references, facet-aware mappings, system outputs and dataset I/O.

All indices are 0-based. Dataset files are JSON Lines, one sample per line::

    {"id": "s1", "document": ["...", ...], "reference": ["...", ...],
     "fams": [[[0], [2], [3]], [[1, 3]]], "facet_categories": ["low", "low"]}

``facet_categories`` is optional; when absent, facets with support groups are
``low`` and facets without are ``high``.
"""

from __future__ import annotations

import json
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .rouge import TokenSeq, tokenize

NOISE, LOW, HIGH = "noise", "low", "high"
FACET_CATEGORIES = (NOISE, LOW, HIGH)
SAMPLE_CATEGORIES = ("N", "L", "H")


class DatasetError(ValueError):
    """Malformed or invariant-violating input data."""


@dataclass(frozen=True)
class Sentence:
    raw: str

    def __post_init__(self):
        if not isinstance(self.raw, str) or not self.raw.strip():
            raise DatasetError("sentence text must be a non-empty string")

    @cached_property
    def tokens(self) -> TokenSeq:
        return tokenize(self.raw)

    def tokenized(self, stemming: bool = False) -> TokenSeq:
        return tokenize(self.raw, stemming)


@dataclass(frozen=True)
class SupportGroup:
    indices: tuple[int, ...]

    def __post_init__(self):
        if not self.indices:
            raise DatasetError("support group must be non-empty")
        if len(set(self.indices)) != len(self.indices):
            raise DatasetError(f"support group has duplicate indices: {list(self.indices)}")
        if any(not isinstance(i, int) or isinstance(i, bool) or i < 0 for i in self.indices):
            raise DatasetError(f"support indices must be non-negative integers: {list(self.indices)}")

    @cached_property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.indices)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Fam:
    """Support groups of one facet (one reference sentence)."""

    groups: tuple[SupportGroup, ...] = ()
    facet_category: str = ""

    def __post_init__(self):
        if not self.facet_category:
            object.__setattr__(self, "facet_category", LOW if self.groups else HIGH)
        if self.facet_category not in FACET_CATEGORIES:
            raise DatasetError(f"unknown facet category {self.facet_category!r}")
        if self.facet_category == HIGH and self.groups:
            raise DatasetError("high-abstraction facet cannot have support groups")
        if self.facet_category == LOW and not self.groups:
            raise DatasetError("low-abstraction facet needs at least one support group")

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for g in self.groups for i in g.indices)


@dataclass(frozen=True)
class Sample:
    id: str
    document: tuple[Sentence, ...]
    reference: tuple[Sentence, ...]
    fams: tuple[Fam, ...]
    explicit_categories: bool = field(default=False, compare=False)

    def __post_init__(self):
        def fail(what):
            raise DatasetError(f"sample {self.id!r}: {what}")

        if not self.document:
            fail("document: must contain at least one sentence")
        if not self.reference:
            fail("reference: must contain at least one sentence")
        if len(self.fams) != len(self.reference):
            fail(f"fams: expected {len(self.reference)} facets, got {len(self.fams)}")
        n_doc = len(self.document)
        for f, fam in enumerate(self.fams):
            for group in fam.groups:
                bad = [i for i in group.indices if i >= n_doc]
                if bad:
                    fail(f"fams[{f}]: support index {bad[0]} out of range for document of length {n_doc}")

    @property
    def sample_category(self) -> str:
        cats = {fam.facet_category for fam in self.fams}
        if NOISE in cats:
            return "N"
        if HIGH in cats:
            return "H"
        return "L"

    @cached_property
    def support_union(self) -> frozenset[int]:
        return frozenset(i for fam in self.fams for i in fam.support)

    def document_tokens(self, stemming: bool = False) -> list[TokenSeq]:
        return [s.tokenized(stemming) for s in self.document]

    def reference_tokens(self, stemming: bool = False) -> list[TokenSeq]:
        return [s.tokenized(stemming) for s in self.reference]

    def check_indices(self, indices: Iterable[int]) -> None:
        n_doc = len(self.document)
        for i in indices:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < n_doc:
                raise DatasetError(f"sample {self.id!r}: extracted index {i!r} out of range [0, {n_doc})")


@dataclass(frozen=True)
class SystemOutput:
    """A system's extractions (index tuples) or, for abstractive systems, summary texts."""

    system_name: str
    extractions: dict[str, tuple[int, ...]] = field(default_factory=dict)
    summaries: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def abstractive(self) -> bool:
        return bool(self.summaries) and not self.extractions


@dataclass
class DatasetStats:
    sample_count: int
    sample_count_by_category: dict[str, int]
    facet_count: int
    facet_count_by_category: dict[str, int]
    facets_by_sample_category: dict[str, int]
    nonempty_fam_count: int
    avg_support_sentences_unique: float
    avg_support_sentences_nonunique: float
    avg_groups_per_facet: float
    mean_group_size_histogram: dict[int, int]

    def as_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "sample_count_by_category": self.sample_count_by_category,
            "facet_count": self.facet_count,
            "facet_count_by_category": self.facet_count_by_category,
            "facets_by_sample_category": self.facets_by_sample_category,
            "nonempty_fam_count": self.nonempty_fam_count,
            "avg_support_sentences_unique": self.avg_support_sentences_unique,
            "avg_support_sentences_nonunique": self.avg_support_sentences_nonunique,
            "avg_groups_per_facet": self.avg_groups_per_facet,
            "mean_group_size_histogram": {str(k): v for k, v in sorted(self.mean_group_size_histogram.items())},
        }


# --- records -----------------------------------------------------------------


def _text_list(record: dict, key: str) -> list[str]:
    value = record.get(key)
    if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
        raise DatasetError(f"field {key!r} must be a list of strings")
    return value


def sample_from_record(record: dict) -> Sample:
    """Build a validated :class:`Sample` from a decoded JSON record."""
    if not isinstance(record, dict):
        raise DatasetError("record must be a JSON object")
    sid = record.get("id")
    if not isinstance(sid, str) or not sid:
        raise DatasetError("field 'id' must be a non-empty string")
    try:
        document = tuple(Sentence(t) for t in _text_list(record, "document"))
        reference = tuple(Sentence(t) for t in _text_list(record, "reference"))
        raw_fams = record.get("fams", [[] for _ in reference])
        if not isinstance(raw_fams, list):
            raise DatasetError("field 'fams' must be a list")
        categories = record.get("facet_categories")
        if categories is not None and (not isinstance(categories, list) or len(categories) != len(raw_fams)):
            raise DatasetError("field 'facet_categories' must be a list with one entry per facet")
        fams = []
        for f, raw_groups in enumerate(raw_fams):
            if not isinstance(raw_groups, list) or not all(isinstance(g, list) for g in raw_groups):
                raise DatasetError(f"fams[{f}] must be a list of index lists")
            groups = tuple(SupportGroup(tuple(g)) for g in raw_groups)
            fams.append(Fam(groups, categories[f] if categories is not None else ""))
    except DatasetError as exc:
        if str(exc).startswith("sample "):
            raise
        raise DatasetError(f"sample {sid!r}: {exc}") from None
    return Sample(sid, document, reference, tuple(fams), explicit_categories=categories is not None)


def sample_to_record(sample: Sample, with_categories: bool | None = None) -> dict:
    if with_categories is None:
        with_categories = sample.explicit_categories
    record = {
        "id": sample.id,
        "document": [s.raw for s in sample.document],
        "reference": [s.raw for s in sample.reference],
        "fams": [[list(g.indices) for g in fam.groups] for fam in sample.fams],
    }
    if with_categories:
        record["facet_categories"] = [fam.facet_category for fam in sample.fams]
    return record


def _iter_json_lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: parse error: {exc.msg}") from None


def load_dataset(path: str | Path) -> list[Sample]:
    """Load and validate a JSON Lines dataset, preserving file order."""
    samples: list[Sample] = []
    seen: set[str] = set()
    for lineno, record in _iter_json_lines(path):
        try:
            sample = sample_from_record(record)
        except DatasetError as exc:
            raise DatasetError(f"{path}:{lineno}: {exc}") from None
        if sample.id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate sample id {sample.id!r}")
        seen.add(sample.id)
        samples.append(sample)
    return samples


def dumps_dataset(samples: Iterable[Sample], with_categories: bool | None = None) -> str:
    return "".join(
        json.dumps(sample_to_record(s, with_categories), ensure_ascii=False) + "\n" for s in samples
    )


def save_dataset(samples: Iterable[Sample], path: str | Path, with_categories: bool | None = None) -> None:
    Path(path).write_text(dumps_dataset(samples, with_categories), encoding="utf-8")


# --- system outputs ----------------------------------------------------------

_PUNCT_RE = re.compile(f"[{re.escape(string.punctuation)}‘’“”–—…«»]")


def normalize_text(text: str) -> str:
    return " ".join(_PUNCT_RE.sub("", text.lower()).split())


def match_text_to_indices(texts: Sequence[str], document: Sequence[Sentence]) -> tuple[int, ...]:
    """Map extracted sentence texts back to document indices by exact normalized match.

    Each text maps to the first document sentence with the same normalized form.
    Duplicates in the result are dropped, keeping first occurrence order.

    Raises:
        DatasetError: if any text has no matching document sentence.
    """
    lookup: dict[str, int] = {}
    for i, sent in enumerate(document):
        lookup.setdefault(normalize_text(sent.raw), i)
    out: list[int] = []
    missing = []
    for text in texts:
        idx = lookup.get(normalize_text(text))
        if idx is None:
            missing.append(text)
        elif idx not in out:
            out.append(idx)
    if missing:
        raise DatasetError("no matching document sentence for: " + "; ".join(repr(t) for t in missing))
    return tuple(out)


def load_system_output(
    path: str | Path, dataset: Sequence[Sample], name: str | None = None, abstractive: bool = False
) -> SystemOutput:
    """Load a system-output JSON Lines file.

    Each record has ``id`` plus either ``indices`` or ``sentences``. Sentence
    texts are resolved to indices unless ``abstractive`` is set, in which case
    they are kept as summary text and scored by ROUGE only.
    """
    by_id = {s.id: s for s in dataset}
    name = name or Path(path).stem
    extractions: dict[str, tuple[int, ...]] = {}
    summaries: dict[str, tuple[str, ...]] = {}
    for lineno, record in _iter_json_lines(path):
        where = f"{path}:{lineno}"
        sid = record.get("id") if isinstance(record, dict) else None
        if sid not in by_id:
            raise DatasetError(f"{where}: unknown sample id {sid!r}")
        sample = by_id[sid]
        if "indices" in record:
            indices = record["indices"]
            if not isinstance(indices, list):
                raise DatasetError(f"{where}: field 'indices' must be a list")
            try:
                sample.check_indices(indices)
            except DatasetError as exc:
                raise DatasetError(f"{where}: {exc}") from None
            extractions[sid] = tuple(dict.fromkeys(indices))
        elif "sentences" in record:
            texts = record["sentences"]
            if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
                raise DatasetError(f"{where}: field 'sentences' must be a list of strings")
            if abstractive:
                summaries[sid] = tuple(texts)
            else:
                try:
                    extractions[sid] = match_text_to_indices(texts, sample.document)
                except DatasetError as exc:
                    raise DatasetError(f"{where}: sample {sid!r}: {exc}") from None
        else:
            raise DatasetError(f"{where}: record needs 'indices' or 'sentences'")
    return SystemOutput(name, extractions, summaries)


def save_system_output(system: SystemOutput, path: str | Path) -> None:
    lines = []
    for sid, idx in system.extractions.items():
        lines.append(json.dumps({"id": sid, "indices": list(idx)}) + "\n")
    for sid, texts in system.summaries.items():
        lines.append(json.dumps({"id": sid, "sentences": list(texts)}, ensure_ascii=False) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


# --- dataset-level operations ------------------------------------------------


def dataset_stats(dataset: Sequence[Sample]) -> DatasetStats:
    """Category counts and support-sentence statistics.

    The unique/non-unique support averages are taken over samples that have at
    least one support sentence. N-bar averages group counts over facets with
    at least one group; the histogram counts those facets by rounded mean
    group size.
    """
    if not dataset:
        raise DatasetError("dataset_stats needs a non-empty dataset")
    by_cat = Counter(s.sample_category for s in dataset)
    facet_cats = Counter(f.facet_category for s in dataset for f in s.fams)
    facets_by_sample = Counter()
    unique, nonunique, group_counts = [], [], []
    hist: Counter = Counter()
    for s in dataset:
        facets_by_sample[s.sample_category] += len(s.fams)
        if s.support_union:
            unique.append(len(s.support_union))
            nonunique.append(sum(len(g) for f in s.fams for g in f.groups))
        for f in s.fams:
            if f.groups:
                group_counts.append(f.n_groups)
                mean_size = sum(len(g) for g in f.groups) / f.n_groups
                hist[int(mean_size + 0.5)] += 1

    def mean(xs):
        return sum(xs) / len(xs) if xs else 0.0

    return DatasetStats(
        sample_count=len(dataset),
        sample_count_by_category={c: by_cat.get(c, 0) for c in SAMPLE_CATEGORIES},
        facet_count=sum(facet_cats.values()),
        facet_count_by_category={c: facet_cats.get(c, 0) for c in FACET_CATEGORIES},
        facets_by_sample_category={c: facets_by_sample.get(c, 0) for c in SAMPLE_CATEGORIES},
        nonempty_fam_count=len(group_counts),
        avg_support_sentences_unique=mean(unique),
        avg_support_sentences_nonunique=mean(nonunique),
        avg_groups_per_facet=mean(group_counts),
        mean_group_size_histogram=dict(hist),
    )


def filter_by_category(dataset: Iterable[Sample], categories: Iterable[str]) -> list[Sample]:
    wanted = set(categories)
    unknown = wanted - set(SAMPLE_CATEGORIES)
    if unknown:
        raise DatasetError(f"unknown sample categories: {sorted(unknown)}")
    return [s for s in dataset if s.sample_category in wanted]


def load_human_rankings(path: str | Path) -> dict[str, dict[str, int]]:
    """Read ``{"id": ..., "ranking": {system: rank}}`` records (rank 1 = best)."""
    out: dict[str, dict[str, int]] = {}
    for lineno, record in _iter_json_lines(path):
        ranking = record.get("ranking") if isinstance(record, dict) else None
        sid = record.get("id") if isinstance(record, dict) else None
        if not isinstance(sid, str) or not isinstance(ranking, dict):
            raise DatasetError(f"{path}:{lineno}: need string 'id' and object 'ranking'")
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in ranking.values()):
            raise DatasetError(f"{path}:{lineno}: ranks must be integers >= 1")
        out[sid] = dict(ranking)
    return out
