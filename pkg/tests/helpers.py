"""Shared fixture builders and hypothesis strategies."""

from __future__ import annotations

import json
import random
from itertools import combinations
from pathlib import Path

from hypothesis import strategies as st

from faceteval.corpus import Fam, Sample, Sentence, SupportGroup, sample_from_record

# Reference sentence pairs with known ROUGE-1 values (reference, lexical-overlap sentence, manual extract)
LISTERIA_REF = "Three people in Kansas have died from a listeria outbreak."
LISTERIA_OVERLAP = ("But they did not appear identical to listeria samples taken from patients "
                    "infected in the Kansas outbreak.")
LISTERIA_MANUAL = ("Five people were infected and three died in the past year in Kansas from listeria "
                   "that might be linked to blue bell creameries products, according to the CDC.")
MOURINHO_REF = "Chelsea boss Jose Mourinho and United manager Louis van Gaal are pals."
MOURINHO_MANUAL = ("The duo have been friends since they first worked together at Barcelona in 1997 "
                   "where they enjoyed a successful relationship at the Camp Nou.")

WORDS = ("alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima mike "
         "november oscar papa quebec romeo sierra tango").split()


def worked_example() -> Sample:
    """r1 -> {{d1},{d3},{d4}}, r2 -> {{d2,d4}} with 0-based indices."""
    return sample_from_record({
        "id": "fig1",
        "document": ["first sentence", "second sentence", "third sentence", "fourth sentence"],
        "reference": ["facet one", "facet two"],
        "fams": [[[0], [2], [3]], [[1, 3]]],
    })


def make_sample(sid: str, doc_len: int, fams: list[list[list[int]]], rng: random.Random) -> Sample:
    document = tuple(Sentence(" ".join(rng.choices(WORDS, k=rng.randint(3, 9)))) for _ in range(doc_len))
    reference = tuple(Sentence(" ".join(rng.choices(WORDS, k=rng.randint(3, 9)))) for _ in fams)
    return Sample(sid, document, reference, tuple(Fam(tuple(SupportGroup(tuple(g)) for g in f)) for f in fams))


def random_fams(rng: random.Random, doc_len: int, n_facets: int, empty_rate: float = 0.2) -> list:
    fams = []
    for _ in range(n_facets):
        if rng.random() < empty_rate:
            fams.append([])
            continue
        groups = []
        for _ in range(rng.randint(1, 3)):
            groups.append(sorted(rng.sample(range(doc_len), rng.randint(1, min(2, doc_len)))))
        fams.append(groups)
    return fams


@st.composite
def samples(draw, max_doc: int = 12, max_facets: int = 4, allow_empty_fam: bool = True):
    doc_len = draw(st.integers(1, max_doc))
    n_facets = draw(st.integers(1, max_facets))
    index = st.integers(0, doc_len - 1)
    group = st.lists(index, min_size=1, max_size=3, unique=True)
    fam = st.lists(group, min_size=0 if allow_empty_fam else 1, max_size=3)
    fams = draw(st.lists(fam, min_size=n_facets, max_size=n_facets))
    seed = draw(st.integers(0, 2**16))
    return make_sample("h", doc_len, fams, random.Random(seed))


def subsets(indices, max_size):
    for size in range(max_size + 1):
        yield from combinations(indices, size)


def write_synthetic(tmp: Path, n_samples: int = 12, n_systems: int = 3, seed: int = 7) -> dict:
    """Synthetic dataset plus extractive and abstractive system files; returns paths."""
    rng = random.Random(seed)
    records, systems = [], {f"sys{j}": [] for j in range(n_systems)}
    abstractive = []
    cats = ["low", "noise", "high"]
    for i in range(n_samples):
        doc_len = rng.randint(4, 10)
        n_facets = rng.randint(1, 3)
        cat = cats[i % 3] if i % 4 == 0 else "low"
        fams = random_fams(rng, doc_len, n_facets, empty_rate=0.0)
        facet_categories = ["low"] * n_facets
        if cat == "noise":
            facet_categories[0] = "noise"
        elif cat == "high":
            fams[-1] = []
            facet_categories[-1] = "high"
        document = [" ".join(rng.choices(WORDS, k=rng.randint(4, 10))) for _ in range(doc_len)]
        # references copy support sentences with light edits so labelers have signal
        reference = []
        for groups in fams:
            if groups:
                words = " ".join(document[j] for j in groups[0]).split()
                reference.append(" ".join(words[: max(3, len(words) - 1)]))
            else:
                reference.append(" ".join(rng.choices(WORDS, k=5)))
        sid = f"s{i:03d}"
        records.append({"id": sid, "document": document, "reference": reference, "fams": fams,
                        "facet_categories": facet_categories})
        for name in systems:
            systems[name].append({"id": sid, "indices": rng.sample(range(doc_len), 3)})
        abstractive.append({"id": sid, "sentences": [" ".join(rng.choices(WORDS, k=6))]})

    paths = {"data": tmp / "data.jsonl", "systems": {}, "abstractive": tmp / "abs.jsonl"}
    paths["data"].write_text("".join(json.dumps(r) + "\n" for r in records))
    for name, rows in systems.items():
        p = tmp / f"{name}.jsonl"
        p.write_text("".join(json.dumps(r) + "\n" for r in rows))
        paths["systems"][name] = p
    paths["abstractive"].write_text("".join(json.dumps(r) + "\n" for r in abstractive))
    return paths
