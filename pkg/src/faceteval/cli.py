"""Batch command-line interface.

Usage::

    faceteval eval --fams data.jsonl --system NeuSum=neusum.jsonl --lead 3 --oracle --categories L
    faceteval label --fams data.jsonl --method rouge-avg-f1 --topn 3 --out machine.jsonl
    faceteval bench-labelers --fams data.jsonl
    faceteval correlate --fams data.jsonl --system A=a.jsonl --system B=b.jsonl
    faceteval autofar --fams data.jsonl --system A=a.jsonl ... --predict-data full.jsonl --predict-system A=a_full.jsonl
    faceteval breakdown --fams data.jsonl --system A=a.jsonl --abstractive PG=pg.jsonl
    faceteval stats --fams data.jsonl
    faceteval convert --in released.json --out data.jsonl

Exit codes: 0 success, 1 metric-level failure (undefined statistic), 2 input or IO error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments
from .convert import DEFAULT_FIELDS, convert_file
from .corpus import (
    SAMPLE_CATEGORIES,
    DatasetError,
    dumps_dataset,
    filter_by_category,
    load_dataset,
    load_human_rankings,
    load_system_output,
)
from .labelers import LabelerConfig, label_dataset
from .metrics import FacetScope, MetricError
from .report import Table
from .stats import StatsError, human_rank_agreement

log = logging.getLogger("faceteval")


class MetricFailure(Exception):
    """Output was produced but some statistic was undefined (exit code 1)."""


def _named_path(value: str) -> tuple[str, str]:
    if "=" in value:
        name, path = value.split("=", 1)
    else:
        name, path = Path(value).stem, value
    if not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {value!r}")
    return name, path


def _categories(value: str) -> tuple[str, ...]:
    cats = tuple(c.strip().upper() for c in value.split(",") if c.strip())
    bad = [c for c in cats if c not in SAMPLE_CATEGORIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown categories {bad}; use N, L, H")
    return cats


def _csv(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _ints(value: str) -> list[int]:
    try:
        return [int(v) for v in _csv(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fams", help="dataset JSONL with documents, references and FAMs")
    common.add_argument("--system", action="append", default=[], type=_named_path, metavar="NAME=PATH",
                        help="extractive system output (repeatable)")
    common.add_argument("--categories", type=_categories, default=SAMPLE_CATEGORIES,
                        help="comma-separated sample categories to keep (default N,L,H)")
    common.add_argument("--scope", choices=["mappable", "all"], default="mappable")
    common.add_argument("--k", type=int, default=None, help="truncate extractions to their first k indices")
    common.add_argument("--format", choices=["json", "tsv"], default="tsv")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-sample work")
    common.add_argument("--stemming", action="store_true", help="apply the Porter stemmer before ROUGE")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="faceteval", description="Facet-aware evaluation of extractive summaries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="FAR/SAR/ROUGE/redundancy per system")
    p.add_argument("--lead", type=int, default=None, metavar="K", help="add a Lead-K row")
    p.add_argument("--oracle", action="store_true", help="add the oracle-FAR row (k from --k, default 3)")
    p.add_argument("--abstractive", action="append", default=[], type=_named_path, metavar="NAME=PATH")
    p.add_argument("--per-sample", action="store_true", help="TSV: one row per (system, sample)")
    p.add_argument("--human", help="human-ranking JSONL; adds rank-agreement results")

    p = sub.add_parser("label", parents=[common], help="create machine FAMs")
    p.add_argument("--method", required=True, help="greedy-rouge1, lead-K, tfidf, rouge1-f1, rouge2-f1, "
                   "rougel-recall, rougel-precision, rougel-f1, rouge-avg-f1")
    p.add_argument("--topn", type=int, default=1)
    p.add_argument("--tfidf-scope", choices=["document", "document+reference"], default="document+reference")

    p = sub.add_parser("bench-labelers", parents=[common], help="support-sentence discovery P/R/F1")
    p.add_argument("--methods", type=_csv, default=list(experiments.BENCH_METHODS))
    p.add_argument("--topn", type=int, default=1)

    p = sub.add_parser("correlate", parents=[common], help="estimated vs gold FAR correlation")
    p.add_argument("--methods", type=_csv, default=list(experiments.ESTIMATOR_METHODS))
    p.add_argument("--topn", type=_ints, default=[1, 2, 3])
    p.add_argument("--machine-fams", action="append", default=[], type=_named_path, metavar="NAME=PATH",
                   help="precomputed FAM file used as an estimator (replaces --methods)")

    p = sub.add_parser("autofar", parents=[common], help="fit and extrapolate AutoFAR")
    p.add_argument("--methods", type=_csv, default=list(experiments.ESTIMATOR_METHODS))
    p.add_argument("--topn", type=int, default=3)
    p.add_argument("--predict-data", help="unannotated dataset JSONL for AutoFAR-L")
    p.add_argument("--predict-system", action="append", default=[], type=_named_path, metavar="NAME=PATH")

    p = sub.add_parser("breakdown", parents=[common], help="metric per category subset")
    p.add_argument("--metric", choices=list(experiments.BREAKDOWN_METRICS), default="rouge1_f")
    p.add_argument("--abstractive", action="append", default=[], type=_named_path, metavar="NAME=PATH")

    sub.add_parser("stats", parents=[common], help="dataset statistics")

    p = sub.add_parser("convert", parents=[common], help="convert external annotations to the dataset format")
    p.add_argument("--in", dest="source", required=True)
    p.add_argument("--field", action="append", default=[], metavar="CANONICAL=NAME[,NAME]",
                   help=f"source field names for one of {sorted(DEFAULT_FIELDS)}")
    p.add_argument("--one-based", action="store_true", help="source support indices start at 1")
    return parser


# --- helpers -----------------------------------------------------------------


def _require_fams(args) -> list:
    if not args.fams:
        raise DatasetError("--fams is required for this command")
    return load_dataset(args.fams)


def _dataset(args) -> tuple[list, list]:
    """The full dataset (for resolving system outputs) and its category-filtered view."""
    full = _require_fams(args)
    return full, filter_by_category(full, args.categories)


def _systems(pairs, dataset, abstractive: bool = False) -> list:
    return [load_system_output(path, dataset, name, abstractive) for name, path in pairs]


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _check_nan(table: Table, columns) -> None:
    for row in table.rows:
        for col in columns:
            value = row.get(col)
            if isinstance(value, float) and value != value:
                raise MetricFailure(f"undefined {col} for {row}")


# --- commands ----------------------------------------------------------------


def cmd_eval(args) -> None:
    full, dataset = _dataset(args)
    systems = _systems(args.system, full) + _systems(args.abstractive, full, abstractive=True)
    if not systems and not args.lead and not args.oracle:
        raise DatasetError("eval needs at least one --system, --abstractive, --lead or --oracle")
    scope = FacetScope(args.scope)
    table, reports = experiments.run_eval(dataset, systems, args.categories, scope, args.k, args.lead,
                                          args.oracle, args.stemming, args.jobs)
    human = None
    if args.human:
        human = _human_tables(reports, load_human_rankings(args.human))
    if args.per_sample and args.format == "tsv":
        table = experiments.per_sample_table(reports, scope)
    if args.format == "json":
        extra = {"reports": [r.as_dict() for r in reports]}
        if human:
            extra["human_agreement"] = human[1]
        _emit(table.to_json(extra), args)
    else:
        text = table.to_tsv()
        if human:
            text += "\n" + human[0].to_tsv()
        _emit(text, args)


def _human_tables(reports, rankings) -> tuple[Table, dict]:
    table = Table(["metric", "avg_spearman", "n_samples", "n_skipped"], meta={"command": "eval/human"})
    payload = {}
    for metric in ("far", "rouge1_f", "rouge2_f", "rougeL_f"):
        scores = {}
        for rep in reports:
            for sid, row in rep.per_sample.items():
                if row.get(metric) is not None:
                    scores.setdefault(sid, {})[rep.system_name] = row[metric]
        agreement = human_rank_agreement(scores, rankings)
        table.add(metric=metric, avg_spearman=agreement.avg_spearman, n_samples=agreement.n_samples,
                  n_skipped=agreement.n_skipped)
        payload[metric] = {"avg_spearman": agreement.avg_spearman, "n_samples": agreement.n_samples,
                           "n_skipped": agreement.n_skipped, "rank_proportions": agreement.proportions}
    return table, payload


def cmd_label(args) -> None:
    _, dataset = _dataset(args)
    config = LabelerConfig.from_method(args.method, top_n=args.topn, k=args.k or 3,
                                       tfidf_scope=args.tfidf_scope, stemming=args.stemming)
    _emit(dumps_dataset(label_dataset(dataset, config, args.jobs)), args)


def cmd_bench_labelers(args) -> None:
    _, dataset = _dataset(args)
    configs = [LabelerConfig.from_method(m, top_n=args.topn, stemming=args.stemming) for m in args.methods]
    _emit(experiments.bench_labelers(dataset, configs, args.jobs).render(args.format), args)


def cmd_correlate(args) -> None:
    full, dataset = _dataset(args)
    systems = _systems(args.system, full)
    scope = FacetScope(args.scope)
    if args.machine_fams:
        estimators = {}
        for name, path in args.machine_fams:
            estimators[name] = load_dataset(path)
    else:
        configs = experiments.labeler_grid(args.methods, args.topn, args.stemming)
        estimators = {c.label: label_dataset(dataset, c, args.jobs) for c in configs}
    table = experiments.run_correlate(dataset, systems, estimators, scope)
    _emit(table.render(args.format), args)
    _check_nan(table, ("pearson", "spearman", "kendall"))


def cmd_autofar(args) -> None:
    full, dataset = _dataset(args)
    systems = _systems(args.system, full)
    configs = [LabelerConfig.from_method(m, top_n=args.topn, stemming=args.stemming) for m in args.methods]
    predict, predict_systems = None, []
    if args.predict_data:
        predict = load_dataset(args.predict_data)
        predict_systems = _systems(args.predict_system, predict)
    table, payload = experiments.run_autofar(dataset, systems, configs, predict, predict_systems,
                                             FacetScope(args.scope), args.jobs)
    if args.format == "json":
        _emit(table.to_json(payload), args)
    else:
        corr = Table(["comparison", "pearson", "spearman", "kendall"],
                     ratio_columns={"pearson", "spearman", "kendall"})
        for key in ("far_vs_autofar", "far_vs_autofar_l"):
            if key in payload:
                corr.add(comparison=key, **payload[key])
        model = payload["model"]
        coef = Table(["term", "weight"])
        coef.add(term="intercept", weight=model["intercept"])
        for name, w in zip(model["features"], model["coefficients"]):
            coef.add(term=name, weight=w)
        _emit(table.to_tsv() + "\n" + corr.to_tsv() + "\n" + coef.to_tsv(), args)


def cmd_breakdown(args) -> None:
    dataset = _require_fams(args)
    systems = _systems(args.system, dataset) + _systems(args.abstractive, dataset, abstractive=True)
    if not systems:
        raise DatasetError("breakdown needs at least one --system or --abstractive")
    table = experiments.run_breakdown(dataset, systems, args.metric, FacetScope(args.scope), args.k,
                                      args.stemming, args.jobs)
    _emit(table.render(args.format), args)


def cmd_stats(args) -> None:
    table, flat = experiments.stats_table(_dataset(args)[1])
    if args.format == "json":
        _emit(json.dumps({"meta": table.meta, "stats": flat}, indent=2) + "\n", args)
    else:
        _emit(table.to_tsv(), args)


def cmd_convert(args) -> None:
    fields = {}
    for spec in args.field:
        key, _, names = spec.partition("=")
        if key not in DEFAULT_FIELDS or not names:
            raise DatasetError(f"bad --field {spec!r}; expected one of {sorted(DEFAULT_FIELDS)}=NAME")
        fields[key] = tuple(_csv(names))
    samples = convert_file(args.source, fields, args.one_based)
    _emit(dumps_dataset(samples), args)


COMMANDS = {
    "eval": cmd_eval,
    "label": cmd_label,
    "bench-labelers": cmd_bench_labelers,
    "correlate": cmd_correlate,
    "autofar": cmd_autofar,
    "breakdown": cmd_breakdown,
    "stats": cmd_stats,
    "convert": cmd_convert,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (DatasetError, OSError) as exc:
        print(f"faceteval: error: {exc}", file=sys.stderr)
        return 2
    except (StatsError, MetricError, MetricFailure) as exc:
        print(f"faceteval: metric failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"faceteval: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
