"""Run every experiment on an annotated dataset and write one TSV/JSON per table.

Example::

    python scripts/reproduce_tables.py --fams data/annotated.jsonl \
        --system NeuSum=outputs/neusum.jsonl --system BanditSum=outputs/banditsum.jsonl \
        --out results/

With no ``--system`` the script still produces the dataset statistics, the
Lead-3 and oracle rows and the labeler benchmark. Correlation and AutoFAR
need at least two systems.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from faceteval import experiments
from faceteval.corpus import filter_by_category, load_dataset, load_system_output
from faceteval.labelers import LabelerConfig, label_dataset
from faceteval.metrics import FacetScope

log = logging.getLogger("reproduce")


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fams", required=True, type=Path)
    p.add_argument("--system", action="append", default=[], metavar="NAME=PATH")
    p.add_argument("--k", type=int, default=3, help="extraction budget for Lead and oracle rows")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results"))
    return p.parse_args(argv)


def write(table, path: Path, extra=None) -> None:
    path.with_suffix(".tsv").write_text(table.to_tsv(), newline="\n")
    path.with_suffix(".json").write_text(table.to_json(extra), newline="\n")
    log.info("wrote %s.{tsv,json}", path)


def main(argv=None) -> None:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    data = load_dataset(args.fams)
    systems = []
    for spec in args.system:
        name, _, path = spec.partition("=")
        systems.append(load_system_output(path, data, name))

    write(experiments.stats_table(data)[0], args.out / "dataset_stats")

    # FAR is reported for the low-abstraction subset and for every mappable facet
    for cats in (("L",), ("N", "L", "H")):
        subset = filter_by_category(data, set(cats))
        table, _ = experiments.run_eval(subset, systems, cats, FacetScope.MAPPABLE_ONLY, args.k,
                                        lead=args.k, oracle=True, jobs=args.jobs)
        write(table, args.out / f"eval_{''.join(cats)}")

    configs = [LabelerConfig.from_method(m) for m in experiments.BENCH_METHODS]
    write(experiments.bench_labelers(data, configs, args.jobs), args.out / "labelers")

    if len(systems) < 2:
        log.info("fewer than two systems: skipping correlation, AutoFAR and breakdown")
        return
    grid = experiments.labeler_grid(experiments.ESTIMATOR_METHODS, (1, 2, 3))
    estimators = {c.label: label_dataset(data, c, args.jobs) for c in grid}
    write(experiments.run_correlate(data, systems, estimators), args.out / "correlation")

    autofar_configs = [LabelerConfig.from_method(m, top_n=3) for m in experiments.ESTIMATOR_METHODS]
    table, payload = experiments.run_autofar(data, systems, autofar_configs, jobs=args.jobs)
    write(table, args.out / "autofar", payload)

    for metric in ("rouge1_f", "far"):
        write(experiments.run_breakdown(data, systems, metric, jobs=args.jobs), args.out / f"breakdown_{metric}")


if __name__ == "__main__":
    main()
