"""Exact correlation clustering for small graphs.

The branch-and-bound assigns vertices in id order and tries clusters in
increasing index, so leaves are visited in canonical (restricted growth)
order and the first optimum found is the lexicographically smallest one.

The bound for a node with vertices ``0..d`` assigned is

* the cost already incurred among assigned vertices,
* plus, for each unassigned vertex, the cheapest placement of its edges
  towards assigned vertices (each vertex chosen independently),
* plus the optimum of the subproblem induced by the unassigned suffix.

The last term comes from solving the suffixes ``n-1, n-2, ..., 1`` first
(a Russian doll search); each suffix solve reuses the smaller ones.
"""
from __future__ import annotations

import time

import numpy as np

from ..core import Partition, SignedGraph
from ..errors import ValidationError
from .config import CC, ScaledWeights, SolveResult, SolverConfig


class _Timeout(Exception):
    pass


class _Search:
    def __init__(self, pos, neg, suffix_opt, eps, deadline):
        self.pos = pos
        self.diff = neg - pos
        self.m = len(pos)
        self.suffix_opt = suffix_opt
        self.eps = eps
        self.deadline = deadline
        self.nodes = 0
        self.best_value = np.inf
        self.best_labels = None

    def run(self, upper, upper_labels):
        m = self.m
        self.best_value = upper
        self.best_labels = None if upper_labels is None else np.array(upper_labels)
        self.labels = np.zeros(m, dtype=np.int64)
        self.acc = np.zeros((m, m))     # acc[u, c]: sum of diff from u to members of c
        self.pos_assigned = np.zeros(m)
        if m == 0:
            self.best_value, self.best_labels = 0.0, self.labels.copy()
            return
        self._dfs(0, 0, 0.0)

    def _dfs(self, d, k, incurred):
        self.nodes += 1
        if self.nodes & 255 == 0 and time.perf_counter() > self.deadline:
            raise _Timeout
        m = self.m
        own = np.append(self.acc[d, :k], 0.0) + self.pos_assigned[d]
        if d == m - 1:
            for c in range(k + 1):
                value = incurred + own[c]
                if value < self.best_value - self.eps:
                    self.labels[d] = c
                    self.best_value = value
                    self.best_labels = self.labels.copy()
            return

        rest = slice(d + 1, m)
        acc = self.acc[rest, :k]
        col = self.diff[rest, d]
        pos_rest = float(self.pos_assigned[rest].sum() + self.pos[rest, d].sum())
        if k > 0:
            order = np.argsort(acc, axis=1, kind="stable")
            rows = np.arange(acc.shape[0])
            first = acc[rows, order[:, 0]]
            second = acc[rows, order[:, 1]] if k > 1 else np.full(acc.shape[0], np.inf)
            # best placement of each remaining vertex once d joins cluster c
            excl = np.where(order[:, :1] == np.arange(k), second[:, None], first[:, None])
            joined = np.minimum(np.minimum(excl, acc + col[:, None]), 0.0).sum(axis=0)
            opened = np.minimum(np.minimum(first, col), 0.0).sum()
            future = np.append(joined, opened)
        else:
            future = np.array([np.minimum(col, 0.0).sum()])
        bounds = incurred + own + future + pos_rest + self.suffix_opt[d + 1]

        for c in range(k + 1):
            if bounds[c] >= self.best_value - self.eps:
                continue
            self.labels[d] = c
            self.acc[:, c] += self.diff[:, d]
            self.pos_assigned += self.pos[:, d]
            self._dfs(d + 1, max(k, c + 1), incurred + own[c])
            self.acc[:, c] -= self.diff[:, d]
            self.pos_assigned -= self.pos[:, d]


def _extend(labels, pos, neg):
    """Place vertex 0 of ``pos``/``neg`` optimally given labels for vertices 1..m-1."""
    lab = np.asarray(labels, dtype=np.int64)
    k = int(lab.max()) + 1 if lab.size else 0
    row_diff = neg[0, 1:] - pos[0, 1:]
    per_cluster = np.bincount(lab, weights=row_diff, minlength=k) if k else np.zeros(0)
    options = np.append(per_cluster, 0.0)
    c = int(np.argmin(options))
    return np.concatenate(([c], lab)), float(options[c] + pos[0, 1:].sum())


def _cc_value(pos, neg, labels):
    lab = np.asarray(labels)
    same = lab[:, None] == lab[None, :]
    return float((np.where(same, neg, 0.0).sum() + np.where(same, 0.0, pos).sum()) / 2.0)


def branch_and_bound(weights: ScaledWeights, deadline: float, heuristic_labels=None):
    """Return ``(labels, value, proven, nodes)`` in the scaled weight units."""
    pos, neg, eps = weights.pos, weights.neg, weights.eps
    n = len(pos)
    slack = 0.5 if weights.exact else 2.0 * eps
    suffix_opt = np.zeros(n + 1)
    suffix_labels = np.zeros(0, dtype=np.int64)
    nodes = 0
    incumbent = None
    if heuristic_labels is not None:
        incumbent = (np.asarray(heuristic_labels), _cc_value(pos, neg, heuristic_labels))
    try:
        for s in range(n - 1, -1, -1):
            sub_pos, sub_neg = pos[s:, s:], neg[s:, s:]
            ext_labels, ext_value = _extend(suffix_labels, sub_pos, sub_neg)
            ext_value += suffix_opt[s + 1]
            search = _Search(sub_pos, sub_neg, suffix_opt[s:], eps, deadline)
            if s > 0:
                search.run(ext_value, ext_labels)
                suffix_labels = search.best_labels
                suffix_opt[s] = search.best_value
            else:
                upper = ext_value
                if incumbent is not None and incumbent[1] < upper:
                    upper = incumbent[1]
                # slack admits a leaf equal to the upper bound so the lexicographically
                # first optimum is always reached
                search.run(upper + slack, None)
                if search.best_labels is None:
                    search.best_labels = ext_labels
                    search.best_value = ext_value
                suffix_labels = search.best_labels
                suffix_opt[0] = search.best_value
            nodes += search.nodes
    except _Timeout:
        candidates = []
        if incumbent is not None:
            candidates.append(incumbent)
        if s == 0 and search.best_labels is not None:
            candidates.append((search.best_labels, _cc_value(pos, neg, search.best_labels)))
        if not candidates:
            lab = np.zeros(n, dtype=np.int64)
            candidates.append((lab, _cc_value(pos, neg, lab)))
        labels, value = min(candidates, key=lambda t: (t[1], tuple(Partition(tuple(t[0])).assignment)))
        return labels, value, False, nodes + search.nodes
    return suffix_labels, float(suffix_opt[0]), True, nodes


def restricted_growth_strings(n: int):
    """All set partitions of ``range(n)`` as canonical label tuples, in lexicographic order."""
    if n == 0:
        yield ()
        return
    labels = [0] * n
    ceiling = [1] * n   # ceiling[i] = 1 + max(labels[:i]), the largest label allowed at i
    while True:
        yield tuple(labels)
        i = n - 1
        while i > 0 and labels[i] == ceiling[i]:
            i -= 1
        if i == 0:
            return
        labels[i] += 1
        for j in range(i + 1, n):
            labels[j] = 0
            ceiling[j] = max(ceiling[j - 1], labels[j - 1] + 1)


def brute_force_cc(graph: SignedGraph, max_vertices: int = 10) -> SolveResult:
    """Enumerate every set partition; intended as a cross-check for tiny graphs."""
    if graph.n > max_vertices:
        raise ValidationError(f"brute force limited to {max_vertices} vertices, graph has {graph.n}")
    start = time.perf_counter()
    weights = ScaledWeights(graph)
    all_labels = np.array(list(restricted_growth_strings(graph.n)), dtype=np.int64).reshape(-1, graph.n)
    u, v, _, s = graph.edge_arrays
    w = np.where(s > 0, weights.pos[u, v], weights.neg[u, v])
    same = all_labels[:, u] == all_labels[:, v]
    misplaced = np.where(s > 0, ~same, same)
    costs = (misplaced * w).sum(axis=1)
    best = costs.min()
    # first index within tolerance of the minimum is the lexicographically smallest optimum
    idx = int(np.flatnonzero(costs <= best + weights.eps)[0])
    return SolveResult(
        partition=Partition(tuple(all_labels[idx])),
        objective=weights.to_objective(costs[idx]),
        objective_kind=CC,
        iterations_used=len(all_labels),
        elapsed_seconds=time.perf_counter() - start,
        proven_optimal=True,
    )


def exact_cc(graph: SignedGraph, config: SolverConfig | None = None,
             max_vertices: int | None = None, warm_start: bool = True) -> SolveResult:
    """Globally minimal imbalance, or the best incumbent if the budget runs out.

    ``warm_start`` seeds the search with a short ILS run, which only tightens
    the initial upper bound; optimality and tie-breaking are unaffected.
    """
    config = config or SolverConfig()
    if max_vertices is not None and graph.n > max_vertices:
        raise ValidationError(f"exact solver limited to {max_vertices} vertices, graph has {graph.n}")
    start = time.perf_counter()
    deadline = start + config.time_budget
    weights = ScaledWeights(graph)
    heuristic = None
    if warm_start and graph.n > 1 and graph.edge_count:
        from .ils import ils_cc
        quick = config.with_(max_iterations=min(config.max_iterations, 50), restarts=1,
                             time_budget=max(config.time_budget * 0.05, 1e-3))
        heuristic = ils_cc(graph, quick).partition.assignment
    labels, value, proven, nodes = branch_and_bound(weights, deadline, heuristic)
    return SolveResult(
        partition=Partition(tuple(int(x) for x in labels)),
        objective=weights.to_objective(value),
        objective_kind=CC,
        iterations_used=nodes,
        elapsed_seconds=time.perf_counter() - start,
        proven_optimal=proven,
        seed=config.rng_seed,
    )
