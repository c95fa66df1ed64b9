"""Partition comparison and the filtering / heuristic-quality reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .core import (NEGATIVE, POSITIVE, Partition, SignedGraph, connected_components,
                   imbalance, imbalance_percent)
from .errors import DomainMismatchError, ValidationError
from .solvers import SolverConfig, exact_cc, ils_cc


@dataclass(frozen=True)
class ConfusionTable:
    counts: np.ndarray

    @classmethod
    def of(cls, p1: Partition, p2: Partition) -> "ConfusionTable":
        if p1.n != p2.n:
            raise DomainMismatchError(f"partitions cover {p1.n} and {p2.n} vertices")
        counts = np.zeros((p1.cluster_count, p2.cluster_count), dtype=np.int64)
        np.add.at(counts, (p1.as_array(), p2.as_array()), 1)
        return cls(counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(p1: Partition, p2: Partition) -> float:
    """Normalized mutual information, ``2 MI / (H1 + H2)`` with natural logs.

    Two single-cluster partitions score 1; if exactly one side has zero
    entropy the score is 0.
    """
    table = ConfusionTable.of(p1, p2)
    n = table.total
    if p1.assignment == p2.assignment:
        return 1.0
    h1 = _entropy(table.row_sums, n)
    h2 = _entropy(table.col_sums, n)
    if h1 == 0.0 and h2 == 0.0:
        return 1.0
    if h1 == 0.0 or h2 == 0.0:
        return 0.0
    nz = table.counts > 0
    joint = table.counts[nz] / n
    outer = np.outer(table.row_sums, table.col_sums)[nz] / (n * n)
    mi = float((joint * np.log(joint / outer)).sum())
    return min(1.0, max(0.0, 2.0 * mi / (h1 + h2)))


@dataclass
class InstanceReport:
    """One row of a filtering or benchmark report; unused fields stay ``None``."""

    instance_id: str
    n_vertices: int
    # filtering
    links_pos_pre: int | None = None
    links_neg_pre: int | None = None
    links_pos_post: int | None = None
    links_neg_post: int | None = None
    weight_pos_pre: float | None = None
    weight_neg_pre: float | None = None
    weight_pos_post: float | None = None
    weight_neg_post: float | None = None
    link_removed_fraction: float | None = None
    link_removed_fraction_pos: float | None = None
    link_removed_fraction_neg: float | None = None
    weight_removed_fraction: float | None = None
    weight_removed_fraction_pos: float | None = None
    weight_removed_fraction_neg: float | None = None
    component_sizes_pre: list[int] | None = None
    component_sizes_post: list[int] | None = None
    giant_share_pre: float | None = None
    giant_share_post: float | None = None
    giant_retained: float | None = None
    clusters_unfiltered: int | None = None
    clusters_filtered: int | None = None
    cluster_count_delta: int | None = None
    nmi_filtered_vs_unfiltered: float | None = None
    imbalance_pct_unfiltered: float | None = None
    imbalance_pct_filtered: float | None = None
    imbalance_pct_delta: float | None = None
    # heuristic evaluation
    exact_objective: float | None = None
    heuristic_objective: float | None = None
    exact_pct: float | None = None
    heuristic_pct: float | None = None
    gap_pct: float | None = None
    exact_proven_optimal: bool | None = None
    exact_clusters: int | None = None
    heuristic_clusters: int | None = None
    nmi_heuristic_vs_exact: float | None = None
    exact_seconds: float | None = None
    heuristic_seconds: float | None = None

    def to_row(self) -> dict:
        row = {}
        for name, value in asdict(self).items():
            if isinstance(value, list):
                value = ";".join(str(x) for x in value)
            row[name] = "" if value is None else value
        return row


def _fraction(removed, total):
    return removed / total if total else 0.0


def _percent_or_none(graph, value):
    return imbalance_percent(graph, value) if graph.edge_count else None


def filtering_report(unfiltered: SignedGraph, filtered: SignedGraph, p_unf: Partition,
                     p_f: Partition, instance_id: str = "") -> InstanceReport:
    """Effect of filtering on one instance.

    The imbalance delta is the percent imbalance of ``p_unf`` on the
    unfiltered graph minus that of ``p_f`` on the filtered graph.
    """
    if unfiltered.n != filtered.n:
        raise DomainMismatchError(
            f"unfiltered graph has {unfiltered.n} vertices, filtered has {filtered.n}")
    if p_unf.n != unfiltered.n or p_f.n != filtered.n:
        raise DomainMismatchError("partitions must cover the graphs' vertex set")
    rep = InstanceReport(instance_id, unfiltered.n)
    rep.links_pos_pre, rep.links_neg_pre = unfiltered.count(POSITIVE), unfiltered.count(NEGATIVE)
    rep.links_pos_post, rep.links_neg_post = filtered.count(POSITIVE), filtered.count(NEGATIVE)
    rep.weight_pos_pre = unfiltered.total_weight(POSITIVE)
    rep.weight_neg_pre = unfiltered.total_weight(NEGATIVE)
    rep.weight_pos_post = filtered.total_weight(POSITIVE)
    rep.weight_neg_post = filtered.total_weight(NEGATIVE)
    links_pre, links_post = unfiltered.edge_count, filtered.edge_count
    weight_pre, weight_post = unfiltered.total_weight(), filtered.total_weight()
    rep.link_removed_fraction = _fraction(links_pre - links_post, links_pre)
    rep.link_removed_fraction_pos = _fraction(rep.links_pos_pre - rep.links_pos_post, rep.links_pos_pre)
    rep.link_removed_fraction_neg = _fraction(rep.links_neg_pre - rep.links_neg_post, rep.links_neg_pre)
    rep.weight_removed_fraction = max(0.0, _fraction(weight_pre - weight_post, weight_pre))
    rep.weight_removed_fraction_pos = max(0.0, _fraction(rep.weight_pos_pre - rep.weight_pos_post,
                                                         rep.weight_pos_pre))
    rep.weight_removed_fraction_neg = max(0.0, _fraction(rep.weight_neg_pre - rep.weight_neg_post,
                                                         rep.weight_neg_pre))
    pre = [len(c) for c in connected_components(unfiltered)]
    post = [len(c) for c in connected_components(filtered)]
    rep.component_sizes_pre, rep.component_sizes_post = pre, post
    if unfiltered.n:
        rep.giant_share_pre = pre[0] / unfiltered.n
        rep.giant_share_post = post[0] / filtered.n
        rep.giant_retained = post[0] / pre[0]
    rep.clusters_unfiltered = p_unf.cluster_count
    rep.clusters_filtered = p_f.cluster_count
    rep.cluster_count_delta = p_f.cluster_count - p_unf.cluster_count
    rep.nmi_filtered_vs_unfiltered = nmi(p_unf, p_f)
    rep.imbalance_pct_unfiltered = _percent_or_none(unfiltered, imbalance(unfiltered, p_unf))
    rep.imbalance_pct_filtered = _percent_or_none(filtered, imbalance(filtered, p_f))
    if rep.imbalance_pct_unfiltered is not None and rep.imbalance_pct_filtered is not None:
        rep.imbalance_pct_delta = rep.imbalance_pct_unfiltered - rep.imbalance_pct_filtered
    return rep


def heuristic_report(graph: SignedGraph, exact, heuristic, instance_id: str = "") -> InstanceReport:
    rep = InstanceReport(instance_id, graph.n)
    rep.exact_objective, rep.heuristic_objective = exact.objective, heuristic.objective
    rep.exact_pct = _percent_or_none(graph, exact.objective)
    rep.heuristic_pct = _percent_or_none(graph, heuristic.objective)
    rep.gap_pct = (rep.heuristic_pct - rep.exact_pct) if graph.edge_count else 0.0
    rep.exact_proven_optimal = exact.proven_optimal
    rep.exact_clusters = exact.cluster_count
    rep.heuristic_clusters = heuristic.cluster_count
    rep.nmi_heuristic_vs_exact = nmi(exact.partition, heuristic.partition)
    rep.exact_seconds, rep.heuristic_seconds = exact.elapsed_seconds, heuristic.elapsed_seconds
    return rep


def benchmark(sizes: Sequence[int], source: SignedGraph, config: SolverConfig | None = None,
              instance_prefix: str = "sample") -> list[InstanceReport]:
    """Run both CC solvers on uniform vertex samples of ``source``.

    Samples are drawn from one generator seeded with ``config.rng_seed``;
    each solver gets ``config.time_budget`` per instance.
    """
    config = config or SolverConfig()
    sizes = [int(s) for s in sizes]
    bad = [s for s in sizes if not 0 <= s <= source.n]
    if bad:
        raise ValidationError(f"sample sizes {bad} outside 0..{source.n}")
    rng = np.random.default_rng(config.rng_seed)
    reports = []
    for size in sizes:
        if size == source.n:
            sample = np.arange(size)
        else:
            sample = np.sort(rng.choice(source.n, size=size, replace=False))
        sub = source.induced_subgraph([int(v) for v in sample])
        exact = exact_cc(sub, config)
        heuristic = ils_cc(sub, config)
        reports.append(heuristic_report(sub, exact, heuristic, f"{instance_prefix}-{size}"))
    return reports


def reports_to_csv(reports: Sequence[InstanceReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=[f.name for f in fields(InstanceReport)],
                            lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.to_row())
    return buf.getvalue()


def reports_to_json(reports: Sequence[InstanceReport]) -> str:
    def clean(d):
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}
    return json.dumps([clean(asdict(r)) for r in reports], indent=2) + "\n"


# (series name, report attribute) pairs written to the long-format plot data
PLOT_SERIES = (
    ("exact_seconds", "exact_seconds"),
    ("heuristic_seconds", "heuristic_seconds"),
    ("gap_pct", "gap_pct"),
    ("nmi_heuristic_vs_exact", "nmi_heuristic_vs_exact"),
    ("nmi_filtered_vs_unfiltered", "nmi_filtered_vs_unfiltered"),
    ("imbalance_pct_delta", "imbalance_pct_delta"),
    ("link_removed_fraction", "link_removed_fraction"),
    ("weight_removed_fraction", "weight_removed_fraction"),
)


def long_format_csv(reports: Sequence[InstanceReport]) -> str:
    """``instance_id,n_vertices,series,value`` rows, one per defined measurement."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance_id", "n_vertices", "series", "value"])
    for rep in reports:
        for series, attr in PLOT_SERIES:
            value = getattr(rep, attr)
            if value is not None:
                writer.writerow([rep.instance_id, rep.n_vertices, series, value])
    return buf.getvalue()
