"""Convert externally formatted FAM annotations into the canonical dataset format.

The source may be a JSON array or JSON Lines. Field names are configurable
(see ``docs/convert.md`` for the mapping table). Per facet, FAMs may be given
as lists of index lists, lists of support-sentence texts, or a null / "N/A"
marker for an empty mapping.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from .corpus import HIGH, LOW, NOISE, DatasetError, Sample, Sentence, match_text_to_indices, sample_from_record

DEFAULT_FIELDS = {
    "id": ("id", "ID", "sample_id"),
    "document": ("document", "doc", "article", "text"),
    "reference": ("reference", "summary", "abstract", "highlights"),
    "fams": ("fams", "FAMs", "fam", "support"),
    "category": ("category", "Category", "label"),
}

_CATEGORY_ALIASES = {
    "n": "N", "noise": "N",
    "l": "L", "low": "L", "low abstraction": "L",
    "h": "H", "high": "H", "high abstraction": "H",
}


def _read_records(path: str | Path) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            data = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: parse error: {exc.msg}") from None
    if isinstance(data, dict):
        # an id -> record mapping, or a single record
        data = list(data.values()) if data and all(isinstance(v, dict) for v in data.values()) else [data]
    if not all(isinstance(r, dict) for r in data):
        raise DatasetError(f"{path}: expected JSON objects")
    return data


def _pick(record: dict, names: Iterable[str]) -> Any:
    for name in names:
        if name in record:
            return record[name]
    return None


def _sentences(value: Any, what: str) -> list[str]:
    if isinstance(value, str):
        value = value.split("\n")
    if not isinstance(value, list):
        raise DatasetError(f"field {what!r} must be a list of sentences or newline-separated text")
    return [t.strip() for t in value if isinstance(t, str) and t.strip()]


def _empty_marker(value: Any) -> bool:
    return value is None or (isinstance(value, str) and value.strip().upper() in ("", "N/A", "NA", "NONE"))


def _groups(raw: Any, document: list[Sentence], one_based: bool) -> list[list[int]]:
    if _empty_marker(raw):
        return []
    if not isinstance(raw, list):
        raise DatasetError(f"cannot read support groups from {raw!r}")
    groups = []
    for group in raw:
        if isinstance(group, (int, str)):
            group = [group]
        indices = []
        for item in group:
            if isinstance(item, bool):
                raise DatasetError(f"invalid support entry {item!r}")
            if isinstance(item, int):
                indices.append(item - 1 if one_based else item)
            elif isinstance(item, str):
                indices.extend(match_text_to_indices([item], document))
            else:
                raise DatasetError(f"invalid support entry {item!r}")
        groups.append(list(dict.fromkeys(indices)))
    return groups


def convert_record(
    record: dict, fields: dict[str, tuple[str, ...]] | None = None, one_based: bool = False
) -> Sample:
    """Map one source record onto a canonical :class:`Sample`.

    A sample-level category sets facet categories: every facet of a noise
    sample is ``noise``; otherwise facets with groups are ``low`` and facets
    without are ``high``.
    """
    names = {**DEFAULT_FIELDS, **(fields or {})}
    sid = _pick(record, names["id"])
    if sid is None:
        raise DatasetError(f"record has none of the id fields {names['id']}")
    sid = str(sid)
    try:
        document_text = _sentences(_pick(record, names["document"]), "document")
        reference_text = _sentences(_pick(record, names["reference"]), "reference")
        document = [Sentence(t) for t in document_text]
        raw_fams = _pick(record, names["fams"])
        if _empty_marker(raw_fams):
            raw_fams = [None] * len(reference_text)
        if not isinstance(raw_fams, list) or len(raw_fams) != len(reference_text):
            raise DatasetError("fams must hold one entry per reference sentence")
        fams = [_groups(f, document, one_based) for f in raw_fams]
    except DatasetError as exc:
        raise DatasetError(f"sample {sid!r}: {exc}") from None

    out = {"id": sid, "document": document_text, "reference": reference_text, "fams": fams}
    category = _pick(record, names["category"])
    if category is not None:
        cat = _CATEGORY_ALIASES.get(str(category).strip().lower())
        if cat is None:
            raise DatasetError(f"sample {sid!r}: unknown category {category!r}")
        if cat == "N":
            out["facet_categories"] = [NOISE] * len(fams)
        else:
            out["facet_categories"] = [LOW if groups else HIGH for groups in fams]
    return sample_from_record(out)


def convert_file(
    path: str | Path, fields: dict[str, tuple[str, ...]] | None = None, one_based: bool = False
) -> list[Sample]:
    samples, seen = [], set()
    for n, record in enumerate(_read_records(path), 1):
        try:
            sample = convert_record(record, fields, one_based)
        except DatasetError as exc:
            raise DatasetError(f"{path}: record {n}: {exc}") from None
        if sample.id in seen:
            raise DatasetError(f"{path}: record {n}: duplicate sample id {sample.id!r}")
        seen.add(sample.id)
        samples.append(sample)
    return samples
