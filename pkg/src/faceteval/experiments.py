"""Experiment pipelines behind the CLI commands.

Each function takes loaded data and returns a :class:`~faceteval.report.Table`
(plus, where useful, a payload of extra structured results).
"""

from __future__ import annotations

import math
from typing import Sequence

from . import metrics
from .corpus import SAMPLE_CATEGORIES, DatasetError, Sample, SystemOutput, dataset_stats
from .labelers import LabelerConfig, label_dataset, predicted_support_set
from .metrics import FacetScope, ScoreReport, evaluate_system
from .report import Table
from .stats import correlate_all, ols_fit, ols_predict

BENCH_METHODS = (
    "lead-3",
    "greedy-rouge1",
    "tfidf",
    "rouge1-f1",
    "rouge2-f1",
    "rougel-recall",
    "rougel-precision",
    "rougel-f1",
    "rouge-avg-f1",
)
ESTIMATOR_METHODS = ("rouge1-f1", "rouge2-f1", "rougel-f1", "rouge-avg-f1")


def _cats(categories: Sequence[str]) -> str:
    return "+".join(c for c in SAMPLE_CATEGORIES if c in categories)


# --- eval --------------------------------------------------------------------

EVAL_RATIOS = [*metrics.ROUGE_KEYS, "far", "sar", "redundancy_rate"]


def run_eval(
    dataset: Sequence[Sample],
    systems: Sequence[SystemOutput],
    categories: Sequence[str],
    scope: FacetScope = FacetScope.MAPPABLE_ONLY,
    k: int | None = None,
    lead: int | None = None,
    oracle: bool = False,
    stemming: bool = False,
    jobs: int = 1,
) -> tuple[Table, list[ScoreReport]]:
    systems = list(systems)
    if lead:
        systems.append(metrics.lead_system(dataset, lead))
    if oracle:
        systems.append(metrics.oracle_system(dataset, k or 3, scope))
    reports = [evaluate_system(dataset, s, scope, k, stemming, jobs) for s in systems]

    table = Table(
        ["system", "categories", "scope", "k", "n_samples", *EVAL_RATIOS],
        ratio_columns=set(EVAL_RATIOS),
        meta={"command": "eval", "categories": _cats(categories), "scope": scope.value, "k": k,
              "stemming": stemming},
    )
    for rep in reports:
        table.add(
            system=rep.system_name,
            categories=_cats(categories),
            scope=scope.value,
            k=k if k else "all",
            **{c: rep.aggregate.get(c) for c in ["n_samples", *EVAL_RATIOS]},
        )
    return table, reports


def per_sample_table(reports: Sequence[ScoreReport], scope: FacetScope) -> Table:
    cols = ["system", "id", "n_extracted", *metrics.ROUGE_KEYS, "far", "sar", "covered_facets",
            "scoped_facets", "support_hit", "support_total", "redundant"]
    table = Table(cols, ratio_columns={*metrics.ROUGE_KEYS, "far", "sar"},
                  meta={"command": "eval", "granularity": "per_sample", "scope": scope.value})
    for rep in reports:
        for sid, row in rep.per_sample.items():
            table.add(system=rep.system_name, id=sid, **row)
    return table


# --- labeling ----------------------------------------------------------------


def bench_labelers(
    dataset: Sequence[Sample], configs: Sequence[LabelerConfig], jobs: int = 1
) -> Table:
    """Micro P/R/F1 of each labeler's merged support set against the gold unions."""
    table = Table(["labeler", "precision", "recall", "f1"], ratio_columns={"precision", "recall", "f1"},
                  meta={"command": "bench-labelers", "n_samples": len(dataset)})
    for config in configs:
        machine = label_dataset(dataset, config, jobs)
        preds = {s.id: predicted_support_set(s.fams) for s in machine}
        p, r, f = metrics.support_prf(preds, dataset)
        table.add(labeler=config.label, precision=p, recall=r, f1=f)
    return table


# --- correlation -------------------------------------------------------------


def per_sample_far(
    fam_source: Sequence[Sample], system: SystemOutput, ids: Sequence[str], scope: FacetScope
) -> list[float]:
    by_id = {s.id: s for s in fam_source}
    missing = [sid for sid in ids if sid not in by_id]
    if missing:
        raise DatasetError(f"FAM source lacks {len(missing)} scored samples, e.g. {missing[0]!r}")
    return [metrics.far(by_id[sid], system.extractions[sid], scope) for sid in ids]


def _scored_ids(gold: Sequence[Sample], systems: Sequence[SystemOutput], scope: FacetScope) -> list[str]:
    ids = []
    for s in gold:
        if not metrics._scoped_fams(s, scope):
            continue
        for system in systems:
            if s.id not in system.extractions:
                raise DatasetError(f"system {system.system_name!r} has no output for sample {s.id!r}")
        ids.append(s.id)
    if not ids:
        raise DatasetError("no sample has an in-scope gold facet")
    return ids


def run_correlate(
    gold: Sequence[Sample],
    systems: Sequence[SystemOutput],
    estimators: dict[str, Sequence[Sample]],
    scope: FacetScope = FacetScope.MAPPABLE_ONLY,
) -> Table:
    """Correlate estimated FAR (from each estimator's FAMs) with gold FAR.

    ``system`` granularity correlates per-system means; ``sample`` granularity
    correlates all (system, sample) pairs. Both use the samples that have at
    least one in-scope gold facet.
    """
    if len(systems) < 2:
        raise DatasetError("correlate needs at least two systems")
    ids = _scored_ids(gold, systems, scope)
    gold_far = {s.system_name: per_sample_far(gold, s, ids, scope) for s in systems}
    table = Table(["estimator", "granularity", "n_points", "pearson", "spearman", "kendall"],
                  ratio_columns={"pearson", "spearman", "kendall"},
                  meta={"command": "correlate", "scope": scope.value, "n_samples": len(ids),
                        "systems": [s.system_name for s in systems]})
    for name, machine in estimators.items():
        est_far = {s.system_name: per_sample_far(machine, s, ids, scope) for s in systems}
        sys_x = [math.fsum(est_far[s.system_name]) / len(ids) for s in systems]
        sys_y = [math.fsum(gold_far[s.system_name]) / len(ids) for s in systems]
        table.add(estimator=name, granularity="system", n_points=len(systems), **correlate_all(sys_x, sys_y))
        smp_x = [v for s in systems for v in est_far[s.system_name]]
        smp_y = [v for s in systems for v in gold_far[s.system_name]]
        table.add(estimator=name, granularity="sample", n_points=len(smp_x), **correlate_all(smp_x, smp_y))
    return table


def labeler_grid(methods: Sequence[str], top_ns: Sequence[int], stemming: bool = False) -> list[LabelerConfig]:
    configs = []
    for method in methods:
        config = LabelerConfig.from_method(method, top_n=top_ns[0], stemming=stemming)
        if config.measure is None:
            configs.append(config)
            continue
        configs.extend(LabelerConfig.from_method(method, top_n=n, stemming=stemming) for n in top_ns)
    return configs


# --- AutoFAR -----------------------------------------------------------------


def _features(
    systems: Sequence[SystemOutput],
    machine: dict[str, Sequence[Sample]],
    ids: Sequence[str],
    scope: FacetScope,
) -> dict[str, list[list[float]]]:
    """Per system, one feature row per sample: estimated FAR under each labeler."""
    out = {}
    for system in systems:
        columns = [per_sample_far(m, system, ids, scope) for m in machine.values()]
        out[system.system_name] = [list(row) for row in zip(*columns)]
    return out


def run_autofar(
    train: Sequence[Sample],
    train_systems: Sequence[SystemOutput],
    configs: Sequence[LabelerConfig],
    predict: Sequence[Sample] | None = None,
    predict_systems: Sequence[SystemOutput] = (),
    scope: FacetScope = FacetScope.MAPPABLE_ONLY,
    jobs: int = 1,
) -> tuple[Table, dict]:
    """Fit ground-truth FAR from labeler-estimated FAR on (system, sample) points.

    Returns the per-system table (FAR, AutoFAR, AutoFAR-L) and a payload with
    the model and the FAR-vs-AutoFAR(-L) correlations.
    """
    ids = _scored_ids(train, train_systems, scope)
    machine = {c.label: label_dataset(train, c, jobs) for c in configs}
    feats = _features(train_systems, machine, ids, scope)
    target = {s.system_name: per_sample_far(train, s, ids, scope) for s in train_systems}
    names = [s.system_name for s in train_systems]
    model = ols_fit([row for n in names for row in feats[n]], [v for n in names for v in target[n]])

    far_sys = {n: math.fsum(target[n]) / len(ids) for n in names}
    auto_sys = {n: math.fsum(ols_predict(model, feats[n])) / len(ids) for n in names}
    auto_l: dict[str, float] = {}
    if predict is not None and predict_systems:
        p_ids = [s.id for s in predict]
        for system in predict_systems:
            missing = [sid for sid in p_ids if sid not in system.extractions]
            if missing:
                raise DatasetError(f"system {system.system_name!r} has no output for sample {missing[0]!r}")
        p_machine = {c.label: label_dataset(predict, c, jobs) for c in configs}
        p_feats = _features(predict_systems, p_machine, p_ids, scope)
        auto_l = {n: math.fsum(ols_predict(model, rows)) / len(p_ids) for n, rows in p_feats.items()}

    table = Table(["system", "far", "autofar", "autofar_l"], ratio_columns={"far", "autofar", "autofar_l"},
                  meta={"command": "autofar", "scope": scope.value, "features": [c.label for c in configs],
                        "n_train_points": len(ids) * len(names)})
    for n in names:
        table.add(system=n, far=far_sys[n], autofar=auto_sys[n], autofar_l=auto_l.get(n))
    payload = {
        "model": {"features": [c.label for c in configs], "coefficients": list(model.coefficients),
                  "intercept": model.intercept},
        "far_vs_autofar": correlate_all([far_sys[n] for n in names], [auto_sys[n] for n in names]),
    }
    shared = [n for n in names if n in auto_l]
    if len(shared) >= 2:
        payload["far_vs_autofar_l"] = correlate_all([far_sys[n] for n in shared], [auto_l[n] for n in shared])
    return table, payload


# --- breakdown ---------------------------------------------------------------

BREAKDOWN_METRICS = ("rouge1_f", "rouge2_f", "rougeL_f", "far", "sar")
BREAKDOWN_SUBSETS = {"N": ("N",), "L": ("L",), "H": ("H",), "L+H": ("L", "H")}


def run_breakdown(
    dataset: Sequence[Sample],
    systems: Sequence[SystemOutput],
    metric: str = "rouge1_f",
    scope: FacetScope = FacetScope.MAPPABLE_ONLY,
    k: int | None = None,
    stemming: bool = False,
    jobs: int = 1,
) -> Table:
    if metric not in BREAKDOWN_METRICS:
        raise ValueError(f"unknown breakdown metric {metric!r}; choose from {BREAKDOWN_METRICS}")
    table = Table(["system", "metric", *BREAKDOWN_SUBSETS], ratio_columns=set(BREAKDOWN_SUBSETS),
                  meta={"command": "breakdown", "metric": metric, "scope": scope.value,
                        "counts": {name: sum(s.sample_category in cats for s in dataset)
                                   for name, cats in BREAKDOWN_SUBSETS.items()}})
    for system in systems:
        report = evaluate_system(dataset, system, scope, k, stemming, jobs)
        row = {"system": system.system_name, "metric": metric}
        for name, cats in BREAKDOWN_SUBSETS.items():
            rows = [report.per_sample[s.id] for s in dataset if s.sample_category in cats]
            if system.abstractive and metric in ("far", "sar"):
                row[name] = None
                continue
            if metric == "far":
                values = [r["far"] for r in rows if r["scoped_facets"]]
            elif metric == "sar":
                values = [r["sar"] for r in rows if r["sar"] is not None]
            else:
                values = [r[metric] for r in rows]
            row[name] = math.fsum(values) / len(values) if values else None
        table.add(**row)
    return table


# --- stats -------------------------------------------------------------------


def stats_table(dataset: Sequence[Sample]) -> tuple[Table, dict]:
    st = dataset_stats(dataset)
    table = Table(["statistic", "value"], meta={"command": "stats"})
    flat = st.as_dict()
    for key, value in flat.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                table.add(statistic=f"{key}.{sub}", value=v)
        else:
            table.add(statistic=key, value=value)
    return table, flat


def reference_system(dataset: Sequence[Sample]) -> SystemOutput:
    """An abstractive 'system' that outputs the reference summary itself."""
    return SystemOutput("Reference", summaries={s.id: tuple(x.raw for x in s.reference) for s in dataset})

