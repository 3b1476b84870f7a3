"""Correlation of network metrics across extraction techniques, plus real-data trends."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from . import graph as G
from .extract import ObservationTriple
from .graph import WeightedGraph

COMPARISONS = {"manual_vs_cooc": ("manual", "cooc"), "manual_vs_nlp": ("manual", "nlp")}
CHARACTER_METRICS = ("degree", "betweenness", "eigenvector", "closeness", "local_clustering")
EDGE_MODES = ("all", "nonzero", "core")
GLOBAL_METRICS = ("size", "total_weight", "norm_size", "norm_weight", "density", "clustering")
MIN_COMMON_NODES = 3
_RANK_DECIMALS = 9


class AnalysisError(ValueError):
    pass


# ---------------------------------------------------------------- coefficients

def rankdata(xs: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    a = np.asarray(xs, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(a.size)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Product-moment correlation; NaN when either side has zero variance."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise AnalysisError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise AnalysisError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return math.nan
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    return pearson(rankdata(xs), rankdata(ys))


def summary_stats(values: Iterable[float]) -> dict:
    """Five-number summary with median-unbiased quantiles, plus mean and skipped count.

    NaN entries are left out and tallied as ``skipped``.
    """
    vals = np.asarray(list(values), dtype=float)
    defined = vals[~np.isnan(vals)]
    out = {"count": int(defined.size), "skipped": int(vals.size - defined.size)}
    if defined.size == 0:
        out.update(dict.fromkeys(("min", "q1", "median", "q3", "max", "mean")))
        return out
    q1, med, q3 = np.quantile(defined, [0.25, 0.5, 0.75], method="median_unbiased")
    out.update(min=float(defined.min()), q1=float(q1), median=float(med), q3=float(q3),
               max=float(defined.max()), mean=float(defined.mean()))
    return out


# ---------------------------------------------------------------- per-triple comparisons

def global_metrics(g: WeightedGraph) -> dict:
    return {
        "size": G.size(g),
        "total_weight": G.total_edge_weight(g),
        "density": G.density(g) if len(g) >= 2 else math.nan,
        "clustering": G.global_clustering(g),
    }


def compare_global(t: ObservationTriple) -> dict:
    """Global metrics per network, size and weight scaled by their maximum over the triple."""
    raw = {name: global_metrics(t[name]) for name in ("manual", "cooc", "nlp")}
    max_size = max(r["size"] for r in raw.values())
    max_weight = max(r["total_weight"] for r in raw.values())
    for r in raw.values():
        r["norm_size"] = r["size"] / max_size if max_size else math.nan
        r["norm_weight"] = r["total_weight"] / max_weight if max_weight else math.nan
    return raw


def character_metrics(g: WeightedGraph, weighted_eigenvector: bool = True) -> dict:
    out = {}
    for name in CHARACTER_METRICS:
        if name == "eigenvector":
            out[name] = G.eigenvector_centrality(g, weighted=weighted_eigenvector) if g.weights else None
        else:
            out[name] = G.METRICS[name](g)
    return out


def _correlate_metrics(ma: dict, mb: dict, common: list) -> dict:
    out = {}
    for name in CHARACTER_METRICS:
        va, vb = ma[name], mb[name]
        if len(common) < MIN_COMMON_NODES or va is None or vb is None:
            out[name] = math.nan
        else:
            out[name] = spearman([va[c] for c in common], [vb[c] for c in common])
    return out


def compare_characters(t: ObservationTriple, weighted_eigenvector: bool = True) -> dict:
    """Spearman correlation of each character metric, over characters present in both networks."""
    metrics = {n: character_metrics(t[n], weighted_eigenvector) for n in ("manual", "cooc", "nlp")}
    out = {}
    for comp, (a, b) in COMPARISONS.items():
        common = sorted(t[a].nodes & t[b].nodes)
        out[comp] = _correlate_metrics(metrics[a], metrics[b], common)
    return out


@dataclass(frozen=True)
class EdgeWeightComparison:
    mode: str
    pairs: tuple[tuple[int, int], ...]

    def coefficient(self) -> float:
        if len(self.pairs) < 2:
            return math.nan
        xs, ys = zip(*self.pairs)
        return spearman(xs, ys)


def edge_weight_pairs(a: WeightedGraph, b: WeightedGraph, mode: str, core: Iterable = ()) -> EdgeWeightComparison:
    """Paired weights of the same character pair in two networks.

    ``all`` spans every pair over the union of both node sets, ``nonzero``
    keeps pairs with positive weight in either network and ``core`` spans the
    pairs of core characters whether or not they appear.
    """
    if mode == "all":
        keys = combinations(sorted(a.nodes | b.nodes), 2)
    elif mode == "nonzero":
        keys = sorted(set(a.weights) | set(b.weights))
    elif mode == "core":
        keys = combinations(sorted(set(core)), 2)
    else:
        raise AnalysisError(f"unknown edge-weight mode {mode!r}")
    return EdgeWeightComparison(mode, tuple((a.weight(u, v), b.weight(u, v)) for u, v in keys))


def compare_edges(t: ObservationTriple, core: Iterable = ()) -> dict:
    core = sorted(set(core))
    out = {}
    for comp, (a, b) in COMPARISONS.items():
        out[comp] = {}
        for mode in EDGE_MODES:
            if mode == "core" and len(core) < 2:
                out[comp][mode] = math.nan
                continue
            out[comp][mode] = edge_weight_pairs(t[a], t[b], mode, core).coefficient()
    return out


# ---------------------------------------------------------------- run-level report

@dataclass(frozen=True)
class CorrelationRow:
    replicate: int
    comparison: str
    metric: str
    family: str
    coefficient: float

    @property
    def defined(self) -> bool:
        return not math.isnan(self.coefficient)


class CorrelationReport:
    """Per-replicate coefficients and global metrics, with run-level aggregates.

    Character and edge metrics are Spearman coefficients per replicate. Global
    metrics are compared across replicates with Pearson's coefficient.
    """

    def __init__(self, core: Iterable = (), weighted_eigenvector: bool = True):
        self.core = sorted(set(core))
        self.weighted_eigenvector = weighted_eigenvector
        self.rows: list[CorrelationRow] = []
        self.globals: list[tuple[int, str, dict]] = []

    def add(self, t: ObservationTriple) -> None:
        k = t.replicate
        for comp, values in compare_characters(t, self.weighted_eigenvector).items():
            for metric, r in values.items():
                self.rows.append(CorrelationRow(k, comp, metric, "character", r))
        for comp, values in compare_edges(t, self.core).items():
            for mode, r in values.items():
                self.rows.append(CorrelationRow(k, comp, f"edge_{mode}", "edge", r))
        for name, values in compare_global(t).items():
            self.globals.append((k, name, values))

    def coefficients(self, comparison: str, metric: str) -> list[float]:
        return [r.coefficient for r in self.rows if r.comparison == comparison and r.metric == metric]

    def global_series(self, network: str, metric: str) -> list[float]:
        return [v[metric] for _, name, v in self.globals if name == network]

    def global_pearson(self, comparison: str, metric: str) -> float:
        a, b = COMPARISONS[comparison]
        xs = np.array(self.global_series(a, metric), dtype=float)
        ys = np.array(self.global_series(b, metric), dtype=float)
        ok = ~(np.isnan(xs) | np.isnan(ys))
        if ok.sum() < 2:
            return math.nan
        return pearson(xs[ok], ys[ok])

    def weight_inflation(self) -> float:
        """Mean ratio of co-occurrence to manual total weight."""
        ratios = [c / m for c, m in zip(self.global_series("cooc", "total_weight"),
                                         self.global_series("manual", "total_weight")) if m]
        return float(np.mean(ratios)) if ratios else math.nan

    def aggregates(self) -> dict:
        metrics = [*CHARACTER_METRICS, *(f"edge_{m}" for m in EDGE_MODES)]
        corr = {comp: {m: summary_stats(self.coefficients(comp, m)) for m in metrics} for comp in COMPARISONS}
        networks = {name: {m: summary_stats(self.global_series(name, m)) for m in GLOBAL_METRICS}
                    for name in ("manual", "cooc", "nlp")}
        pearsons = {comp: {m: self.global_pearson(comp, m) for m in ("density", "clustering")}
                    for comp in COMPARISONS}
        return {
            "replicates": len({k for k, _, _ in self.globals}),
            "correlations": corr,
            "global": {"networks": networks, "pearson": pearsons, "cooc_weight_ratio_mean": self.weight_inflation()},
        }


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_correlations(report: CorrelationReport, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["replicate", "comparison", "metric", "family", "coefficient", "defined"])
    for r in report.rows:
        w.writerow([r.replicate, r.comparison, r.metric, r.family, _fmt(r.coefficient), int(r.defined)])


def read_correlations(source: TextIO) -> list[CorrelationRow]:
    rows = []
    for rec in csv.DictReader(source):
        coef = float(rec["coefficient"])
        if int(rec["defined"]) != (not math.isnan(coef)):
            raise AnalysisError(f"inconsistent defined flag for replicate {rec['replicate']}")
        rows.append(CorrelationRow(int(rec["replicate"]), rec["comparison"], rec["metric"], rec["family"], coef))
    return rows


def write_globals(report: CorrelationReport, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["replicate", "network", *GLOBAL_METRICS])
    for k, name, v in report.globals:
        w.writerow([k, name, *(_fmt(v[m]) for m in GLOBAL_METRICS)])


def read_globals(source: TextIO) -> list[tuple[int, str, dict]]:
    out = []
    for rec in csv.DictReader(source):
        values = {m: float(rec[m]) for m in GLOBAL_METRICS}
        values["size"] = int(values["size"])
        values["total_weight"] = int(values["total_weight"])
        out.append((int(rec["replicate"]), rec["network"], values))
    return out


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def write_summary(report: CorrelationReport, out: TextIO) -> None:
    json.dump(_json_ready(report.aggregates()), out, indent=2, sort_keys=True)
    out.write("\n")


def read_summary(source: TextIO) -> dict:
    return json.load(source)


# ---------------------------------------------------------------- real-data analyses

@dataclass(frozen=True)
class TrendFit:
    averages: dict
    slope: float
    intercept: float


def mean_core_weight(g: WeightedGraph, core: Iterable) -> float:
    pairs = list(combinations(sorted(set(core)), 2))
    if not pairs:
        raise AnalysisError("need at least two core characters")
    return sum(g.weight(a, b) for a, b in pairs) / len(pairs)


def ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise AnalysisError("need at least two distinct x values")
    slope = float(dx @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


def trend_core_interactions(per_season_graphs: Mapping[int, WeightedGraph], core: Iterable) -> TrendFit:
    """Average weight between core pairs each season, with its least-squares line."""
    if len(per_season_graphs) < 2:
        raise AnalysisError("need at least two seasons")
    core = list(core)
    averages = {m: mean_core_weight(g, core) for m, g in sorted(per_season_graphs.items())}
    slope, intercept = ols(list(averages), list(averages.values()))
    return TrendFit(averages, slope, intercept)


def write_trend(fits: Mapping[str, TrendFit], out: TextIO) -> None:
    """Rows per (season, dataset); each dataset also gets ``slope`` and ``intercept`` rows."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["season", "avg_core_interactions", "dataset"])
    for dataset, fit in fits.items():
        for m, avg in fit.averages.items():
            w.writerow([m, _fmt(float(avg)), dataset])
        w.writerow(["slope", _fmt(fit.slope), dataset])
        w.writerow(["intercept", _fmt(fit.intercept), dataset])


def read_trend(source: TextIO) -> dict[str, TrendFit]:
    acc: dict[str, dict] = {}
    for rec in csv.DictReader(source):
        slot = acc.setdefault(rec["dataset"], {"averages": {}})
        value = float(rec["avg_core_interactions"])
        if rec["season"] in ("slope", "intercept"):
            slot[rec["season"]] = value
        else:
            slot["averages"][int(rec["season"])] = value
    return {d: TrendFit(v["averages"], v["slope"], v["intercept"]) for d, v in acc.items()}


def dense_ranks(values: Mapping) -> dict:
    """Dense ranks, 1 for the largest value; ties share the better rank."""
    keyed = {k: round(float(v), _RANK_DECIMALS) for k, v in values.items()}
    distinct = sorted(set(keyed.values()), reverse=True)
    position = {v: i + 1 for i, v in enumerate(distinct)}
    return {k: position[v] for k, v in keyed.items()}


def rank_character(per_season_graphs: Mapping[int, WeightedGraph], character, metric: str = "betweenness") -> dict:
    out = {}
    for m, g in sorted(per_season_graphs.items()):
        if character not in g.nodes:
            raise AnalysisError(f"{character!r} does not appear in season {m}")
        out[m] = dense_ranks(G.METRICS[metric](g))[character]
    return out
