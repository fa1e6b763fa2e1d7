"""Walk through the metrics on the two annotated samples shipped in ``data/``.

Prints, per sample, the gold FAMs, what Lead-3 and the k=3 oracle extract,
their FAR and SAR, and the machine FAMs produced by each labeler.

    python scripts/walkthrough.py [--k 3]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from faceteval.corpus import load_dataset
from faceteval.labelers import LabelerConfig, make_machine_fams, predicted_support_set
from faceteval.metrics import far, lead_k, oracle_extract, redundancy, sar

DATA = Path(__file__).resolve().parents[1] / "data" / "annotated_samples.jsonl"
METHODS = ("greedy-rouge1", "tfidf", "rouge1-f1", "rougel-recall", "rouge-avg-f1")


def show_fams(fams) -> str:
    return "; ".join(f"r{i}->" + (" | ".join(str(set(g.indices)) for g in f.groups) or "none")
                     for i, f in enumerate(fams))


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description="metric walkthrough on the bundled samples")
    p.add_argument("--data", type=Path, default=DATA)
    p.add_argument("--k", type=int, default=3)
    args = p.parse_args(argv)

    for sample in load_dataset(args.data):
        print(f"== {sample.id} ({len(sample.document)} sentences, category {sample.sample_category})")
        print("gold  ", show_fams(sample.fams))
        lead = lead_k(sample, args.k)
        best, best_far = oracle_extract(sample, args.k)
        for name, ext in (("lead", lead), ("oracle", best)):
            print(f"{name:6s} E={list(ext)} FAR={far(sample, ext):.3f} SAR={sar(sample, ext):.3f} "
                  f"redundant={redundancy(sample, ext)}")
        for method in METHODS:
            fams = make_machine_fams(sample, LabelerConfig.from_method(method, top_n=1))
            found = predicted_support_set(fams)
            hit = len(found & sample.support_union)
            print(f"{method:14s} support {sorted(found)}  hits {hit}/{len(sample.support_union)}")
        print()


if __name__ == "__main__":
    main()
