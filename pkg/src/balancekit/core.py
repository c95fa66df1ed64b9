"""Signed graphs, partitions and the two imbalance objectives.

A signed graph carries, for every undirected edge, a weight in ``(0, 1]``
and a sign in ``{+1, -1}``.  Vertices are dense integer ids ``0..n-1``;
labels are carried as metadata and never read by the algorithms.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DomainMismatchError, UndefinedPercentError, ValidationError

POSITIVE = 1
NEGATIVE = -1


class Edge(NamedTuple):
    u: int
    v: int
    weight: float
    sign: int


@dataclass(frozen=True)
class SignedGraph:
    """Immutable undirected signed graph.

    Edges are normalised so that ``u < v`` and kept sorted by ``(u, v)``.
    """

    vertex_count: int
    edges: tuple[Edge, ...] = ()
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise ValidationError(f"vertex_count must be >= 0, got {n}")
        seen = set()
        normalised = []
        for e in self.edges:
            u, v, w, s = int(e[0]), int(e[1]), float(e[2]), int(e[3])
            if u == v:
                raise ValidationError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
            if not 0.0 < w <= 1.0:
                raise ValidationError(f"edge ({u}, {v}) weight {w} not in (0, 1]")
            if s not in (POSITIVE, NEGATIVE):
                raise ValidationError(f"edge ({u}, {v}) sign must be +1 or -1, got {s}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            normalised.append(Edge(u, v, w, s))
        normalised.sort(key=lambda e: (e.u, e.v))
        object.__setattr__(self, "edges", tuple(normalised))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        elif len(self.labels) != n:
            raise ValidationError(f"{len(self.labels)} labels for {n} vertices")
        else:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @classmethod
    def from_signed_weights(cls, vertex_count, triples, labels=()):
        """Build from ``(u, v, signed_weight)`` triples; the sign is folded into the weight."""
        edges = []
        for u, v, sw in triples:
            sw = float(sw)
            if sw == 0.0:
                raise ValidationError(f"edge ({u}, {v}) has zero weight")
            edges.append(Edge(u, v, abs(sw), POSITIVE if sw > 0 else NEGATIVE))
        return cls(vertex_count, tuple(edges), tuple(labels))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(u, v, weight, sign)`` as parallel numpy arrays."""
        if not self.edges:
            empty_i = np.zeros(0, dtype=np.int64)
            return empty_i, empty_i.copy(), np.zeros(0), np.zeros(0, dtype=np.int64)
        u, v, w, s = zip(*self.edges)
        return (np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64),
                np.asarray(w, dtype=float), np.asarray(s, dtype=np.int64))

    @cached_property
    def positive_matrix(self) -> np.ndarray:
        """Dense symmetric matrix of positive edge weights."""
        return self._dense(POSITIVE)

    @cached_property
    def negative_matrix(self) -> np.ndarray:
        """Dense symmetric matrix of negative edge weights (stored as magnitudes)."""
        return self._dense(NEGATIVE)

    def _dense(self, sign):
        m = np.zeros((self.n, self.n))
        u, v, w, s = self.edge_arrays
        mask = s == sign
        m[u[mask], v[mask]] = w[mask]
        m[v[mask], u[mask]] = w[mask]
        return m

    def total_weight(self, sign: int | None = None) -> float:
        _, _, w, s = self.edge_arrays
        if sign is None:
            return float(w.sum())
        return float(w[s == sign].sum())

    def count(self, sign: int | None = None) -> int:
        if sign is None:
            return self.edge_count
        return sum(1 for e in self.edges if e.sign == sign)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for e in self.edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        return adj

    def induced_subgraph(self, vertices: Sequence[int]) -> "SignedGraph":
        """Subgraph on ``vertices``, renumbered densely in the given order."""
        index = {int(v): i for i, v in enumerate(vertices)}
        if len(index) != len(vertices):
            raise ValidationError("induced_subgraph vertices must be distinct")
        edges = [Edge(index[e.u], index[e.v], e.weight, e.sign)
                 for e in self.edges if e.u in index and e.v in index]
        labels = tuple(self.labels[int(v)] for v in vertices)
        return SignedGraph(len(index), tuple(edges), labels)


def canonical_labels(labels: Iterable[int]) -> tuple[int, ...]:
    """Renumber cluster labels by order of first appearance along vertex ids."""
    mapping: dict = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """Assignment of vertices ``0..n-1`` to clusters, always stored canonically.

    Equality between two partitions therefore means equality of the induced
    vertex equivalence, whatever labels were used to build them.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        labels = [int(x) for x in self.assignment]
        object.__setattr__(self, "assignment", canonical_labels(labels))

    @classmethod
    def from_clusters(cls, n: int, clusters: Iterable[Iterable[int]]) -> "Partition":
        labels = [-1] * n
        for c, members in enumerate(clusters):
            for v in members:
                if not 0 <= v < n:
                    raise ValidationError(f"vertex {v} outside 0..{n - 1}")
                if labels[v] != -1:
                    raise ValidationError(f"vertex {v} appears in two clusters")
                labels[v] = c
        missing = [v for v, lab in enumerate(labels) if lab == -1]
        if missing:
            raise ValidationError(f"vertices {missing} are not assigned to any cluster")
        return cls(tuple(labels))

    @classmethod
    def single(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def cluster_count(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def clusters(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.cluster_count)]
        for v, c in enumerate(self.assignment):
            out[c].append(v)
        return [tuple(c) for c in out]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64)


def _check_domain(graph: SignedGraph, partition: Partition):
    if partition.n != graph.n:
        raise DomainMismatchError(
            f"partition covers {partition.n} vertices, graph has {graph.n}")


def block_weights(graph: SignedGraph, partition: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Omega+ and Omega- per cluster block.

    Returns two ``k x k`` upper-triangular matrices: entry ``[i, i]`` holds the
    weight inside cluster ``i`` and ``[i, j]`` (``i < j``) the weight between
    clusters ``i`` and ``j``.  Each undirected edge is counted once.
    """
    _check_domain(graph, partition)
    k = partition.cluster_count
    pos = np.zeros((k, k))
    neg = np.zeros((k, k))
    if graph.edge_count:
        u, v, w, s = graph.edge_arrays
        lab = partition.as_array()
        a, b = lab[u], lab[v]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        np.add.at(pos, (lo[s > 0], hi[s > 0]), w[s > 0])
        np.add.at(neg, (lo[s < 0], hi[s < 0]), w[s < 0])
    return pos, neg


def imbalance(graph: SignedGraph, partition: Partition) -> float:
    """Weight of negative edges inside clusters plus positive edges between them."""
    pos, neg = block_weights(graph, partition)
    return float(np.trace(neg) + np.triu(pos, 1).sum())


def relaxed_imbalance(graph: SignedGraph, partition: Partition) -> float:
    """Sum over cluster blocks of the minority-sign weight.

    Each cluster and each unordered pair of clusters is charged
    ``min(Omega+, Omega-)``, so uniformly signed blocks cost nothing.
    """
    pos, neg = block_weights(graph, partition)
    return float(np.triu(np.minimum(pos, neg)).sum())


def imbalance_percent(graph: SignedGraph, raw_imbalance: float) -> float:
    total = graph.total_weight()
    if graph.edge_count == 0 or total <= 0.0:
        raise UndefinedPercentError("percent imbalance is undefined on a graph without edges")
    return 100.0 * raw_imbalance / total


@dataclass(frozen=True)
class ClusterNode:
    members: tuple[int, ...]
    internal_pos_weight: float
    internal_neg_weight: float


@dataclass(frozen=True)
class ClusterGraph:
    """Quotient of a signed graph by a partition.

    ``pair_weights`` maps ``(i, j)`` with ``i < j`` to ``(pos, neg)`` for every
    cluster pair joined by at least one edge.
    """

    clusters: tuple[ClusterNode, ...]
    pair_weights: dict[tuple[int, int], tuple[float, float]]
    total_graph_weight: float

    def proportion(self, weight: float) -> float:
        if self.total_graph_weight == 0.0:
            return 0.0
        return weight / self.total_graph_weight

    def stored_weight(self) -> float:
        internal = sum(c.internal_pos_weight + c.internal_neg_weight for c in self.clusters)
        return internal + sum(p + q for p, q in self.pair_weights.values())


def build_cluster_graph(graph: SignedGraph, partition: Partition) -> ClusterGraph:
    pos, neg = block_weights(graph, partition)
    members = partition.clusters()
    nodes = tuple(ClusterNode(members[i], float(pos[i, i]), float(neg[i, i]))
                  for i in range(partition.cluster_count))
    pairs: dict[tuple[int, int], tuple[float, float]] = {}
    lab = partition.assignment
    for e in graph.edges:
        a, b = lab[e.u], lab[e.v]
        if a != b:
            key = (min(a, b), max(a, b))
            pairs[key] = (float(pos[key]), float(neg[key]))
    return ClusterGraph(nodes, dict(sorted(pairs.items())), graph.total_weight())


def connected_components(graph: SignedGraph) -> list[set[int]]:
    """Sign-blind components, largest first (ties by smallest member)."""
    adj = graph.neighbors()
    seen = [False] * graph.n
    comps = []
    for start in range(graph.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    queue.append(y)
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def giant_component_share(graph: SignedGraph) -> float:
    """Fraction of the vertices that lie in the largest component."""
    if graph.n == 0:
        return 0.0
    return len(connected_components(graph)[0]) / graph.n
