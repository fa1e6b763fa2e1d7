"""Correlation statistics, human-ranking agreement and ordinary least squares."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as sps


class StatsError(ValueError):
    """A statistic is undefined for the given data."""


class RankDeficiencyError(StatsError):
    pass


@dataclass(frozen=True)
class PairedSeries:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise StatsError(f"series lengths differ: {len(self.x)} vs {len(self.y)}")
        if len(self.x) < 2:
            raise StatsError("correlation needs at least two points")
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise StatsError("series contain non-finite values")


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    s = PairedSeries(x, y)
    xa, ya = np.asarray(s.x), np.asarray(s.y)
    dx, dy = xa - xa.mean(), ya - ya.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise StatsError("zero variance: correlation undefined")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-for-ties ranks."""
    s = PairedSeries(x, y)
    return pearson(sps.rankdata(s.x), sps.rankdata(s.y))


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    s = PairedSeries(x, y)
    if len(set(s.x)) < 2 or len(set(s.y)) < 2:
        raise StatsError("kendall tau-b undefined: a series is constant")
    return float(sps.kendalltau(s.x, s.y, variant="b").statistic)


CORRELATIONS = {"pearson": pearson, "spearman": spearman, "kendall": kendall_tau_b}


def correlate_all(x: Sequence[float], y: Sequence[float]) -> dict[str, float]:
    """All three coefficients; an undefined coefficient is reported as NaN."""
    out = {}
    for name, fn in CORRELATIONS.items():
        try:
            out[name] = fn(x, y)
        except StatsError:
            out[name] = float("nan")
    return out


# --- human rankings ----------------------------------------------------------


@dataclass
class HumanAgreement:
    avg_spearman: float
    n_samples: int
    n_skipped: int
    proportions: dict[str, dict[int, float]] = field(default_factory=dict)


def metric_positions(scores: Mapping[str, float]) -> dict[str, int]:
    """Rank position of each system under a metric (1 = best, ties share the best position)."""
    names = sorted(scores)
    ranks = sps.rankdata([-scores[n] for n in names], method="min")
    return {n: int(r) for n, r in zip(names, ranks)}


def human_rank_agreement(
    metric_scores: Mapping[str, Mapping[str, float]],
    human_ranks: Mapping[str, Mapping[str, int]],
) -> HumanAgreement:
    """Average per-sample Spearman between metric scores and human ranks.

    Human ranks use 1 = best, so they are negated before correlating. Samples
    where either side is all-tied are skipped and counted. ``proportions``
    gives, per system, the share of samples where the metric puts it at each
    rank position.
    """
    rhos = []
    skipped = 0
    position_counts: dict[str, Counter] = defaultdict(Counter)
    n_scored = 0
    for sid in sorted(metric_scores):
        if sid not in human_ranks:
            continue
        systems = sorted(set(metric_scores[sid]) & set(human_ranks[sid]))
        if len(systems) < 2:
            skipped += 1
            continue
        scores = {n: metric_scores[sid][n] for n in systems}
        n_scored += 1
        for name, pos in metric_positions(scores).items():
            position_counts[name][pos] += 1
        try:
            rhos.append(spearman([scores[n] for n in systems], [-human_ranks[sid][n] for n in systems]))
        except StatsError:
            skipped += 1
    if not rhos:
        raise StatsError("no sample has a defined rank correlation")
    proportions = {
        name: {pos: counts[pos] / n_scored for pos in sorted(counts)}
        for name, counts in sorted(position_counts.items())
    }
    return HumanAgreement(math.fsum(rhos) / len(rhos), len(rhos), skipped, proportions)


# --- ordinary least squares --------------------------------------------------


@dataclass(frozen=True)
class OlsModel:
    coefficients: tuple[float, ...]
    intercept: float


def _design(features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise StatsError("features must be a 2-D matrix (points x features)")
    return x


def ols_fit(features, target: Sequence[float]) -> OlsModel:
    """Least-squares fit with an intercept, solved through the normal equations.

    Raises:
        RankDeficiencyError: too few points or collinear columns.
    """
    x = _design(features)
    y = np.asarray(target, dtype=float)
    if x.shape[0] != y.shape[0]:
        raise StatsError(f"{x.shape[0]} feature rows but {y.shape[0]} targets")
    design = np.hstack([np.ones((x.shape[0], 1)), x])
    if design.shape[0] < design.shape[1]:
        raise RankDeficiencyError(f"need at least {design.shape[1]} points, got {design.shape[0]}")
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficiencyError("design matrix is rank deficient")
    beta = np.linalg.solve(design.T @ design, design.T @ y)
    return OlsModel(tuple(float(b) for b in beta[1:]), float(beta[0]))


def ols_predict(model: OlsModel, features) -> list[float]:
    x = _design(features)
    if x.shape[1] != len(model.coefficients):
        raise StatsError(f"model has {len(model.coefficients)} features, got {x.shape[1]}")
    return [float(v) for v in x @ np.asarray(model.coefficients) + model.intercept]
