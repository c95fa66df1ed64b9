"""Iterated local search for CC and RCC.

Both variants share one loop: greedy randomized construction, best-improvement
single-vertex relocation to a fixed point, then repeated kicks that move a few
random vertices, each followed by a new descent.  A kicked solution replaces
the incumbent only if it is strictly better.

Clusters live in a fixed number of slots (``n`` for CC, ``k_max`` for RCC);
an empty slot stands for "open a new cluster".
"""
from __future__ import annotations

import time

import numpy as np

from ..core import Partition, SignedGraph
from ..errors import ValidationError
from .config import CC, RCC, ScaledWeights, SolveResult, SolverConfig


class _CCState:
    """Incremental bookkeeping for the imbalance.

    ``acc[v, c]`` is the negative minus positive weight from ``v`` to the
    members of slot ``c``; the cost attributable to ``v`` in slot ``c`` is
    ``acc[v, c]`` plus a constant, so relocation gains are column differences.
    """

    def __init__(self, weights: ScaledWeights, slots: int):
        self.pos, self.neg = weights.pos, weights.neg
        self.diff = self.neg - self.pos
        self.n = len(self.pos)
        self.slots = slots
        self.labels = np.full(self.n, -1, dtype=np.int64)
        self.sizes = np.zeros(slots, dtype=np.int64)
        self.acc = np.zeros((self.n, slots))
        self.value = 0.0

    def copy(self):
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.labels = self.labels.copy()
        other.sizes = self.sizes.copy()
        other.acc = self.acc.copy()
        return other

    def insertion_costs(self, v):
        """Marginal cost of adding unassigned ``v`` to each slot, given the assigned vertices."""
        assigned = self.labels >= 0
        return self.acc[v] + self.pos[v, assigned].sum()

    def assign(self, v, c, delta):
        self.labels[v] = c
        self.sizes[c] += 1
        self.acc[:, c] += self.diff[:, v]
        self.value += delta

    def move_deltas(self):
        """``n x slots`` gain of relocating each vertex to each slot (0 for staying)."""
        own = self.acc[np.arange(self.n), self.labels]
        return self.acc - own[:, None]

    def move(self, v, c, delta):
        a = self.labels[v]
        self.sizes[a] -= 1
        self.acc[:, a] -= self.diff[:, v]
        self.assign(v, c, delta)

    def recompute(self):
        lab = self.labels
        same = lab[:, None] == lab[None, :]
        return float((np.where(same, self.neg, 0.0).sum()
                      + np.where(same, 0.0, self.pos).sum()) / 2.0)


class _RCCState:
    """Incremental bookkeeping for the relaxed imbalance.

    ``pos_to[v, c]`` / ``neg_to[v, c]``: weight from ``v`` to the members of
    slot ``c``.  ``pos_block`` / ``neg_block``: symmetric slot-by-slot totals,
    internal weight on the diagonal.
    """

    def __init__(self, weights: ScaledWeights, slots: int):
        self.pos, self.neg = weights.pos, weights.neg
        self.n = len(self.pos)
        self.slots = slots
        self.labels = np.full(self.n, -1, dtype=np.int64)
        self.sizes = np.zeros(slots, dtype=np.int64)
        self.pos_to = np.zeros((self.n, slots))
        self.neg_to = np.zeros((self.n, slots))
        self.pos_block = np.zeros((slots, slots))
        self.neg_block = np.zeros((slots, slots))
        self.value = 0.0

    def copy(self):
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        for name in ("labels", "sizes", "pos_to", "neg_to", "pos_block", "neg_block"):
            setattr(other, name, getattr(self, name).copy())
        return other

    def _gain_into(self, p, q):
        """Change of cost when weights ``p``/``q`` (per slot) join the blocks of row ``b``.

        Returns ``rows x slots x slots``; entry ``[v, b, c]`` is the change for block ``(b, c)``.
        """
        pb, nb = self.pos_block, self.neg_block
        before = np.minimum(pb, nb)
        after = np.minimum(pb[None, :, :] + p[:, None, :], nb[None, :, :] + q[:, None, :])
        return after - before[None, :, :]

    def insertion_costs(self, v):
        p, q = self.pos_to[v:v + 1], self.neg_to[v:v + 1]
        return self._gain_into(p, q)[0].sum(axis=1)

    def _shift(self, c, p, q, sign):
        for block, vec in ((self.pos_block, p), (self.neg_block, q)):
            block[c, :] += sign * vec
            block[:, c] += sign * vec
            block[c, c] -= sign * vec[c]

    def assign(self, v, c, delta):
        self._shift(c, self.pos_to[v].copy(), self.neg_to[v].copy(), 1.0)
        self.labels[v] = c
        self.sizes[c] += 1
        self.pos_to[:, c] += self.pos[:, v]
        self.neg_to[:, c] += self.neg[:, v]
        self.value += delta

    def move(self, v, c, delta):
        a = self.labels[v]
        p, q = self.pos_to[v].copy(), self.neg_to[v].copy()
        self._shift(a, p, q, -1.0)
        self.sizes[a] -= 1
        self.pos_to[:, a] -= self.pos[:, v]
        self.neg_to[:, a] -= self.neg[:, v]
        self._shift(c, p, q, 1.0)
        self.labels[v] = c
        self.sizes[c] += 1
        self.pos_to[:, c] += self.pos[:, v]
        self.neg_to[:, c] += self.neg[:, v]
        self.value += delta

    def move_deltas(self):
        n, K = self.n, self.slots
        rows = np.arange(n)
        a = self.labels
        pb, nb = self.pos_block, self.neg_block
        p, q = self.pos_to, self.neg_to
        f = np.minimum
        # blocks (a, c): v's weight leaves them
        leave = f(pb[a] - p, nb[a] - q) - f(pb[a], nb[a])                  # n x K
        # blocks (b, c): v's weight arrives
        arrive = self._gain_into(p, q)                                      # n x K x K
        total_leave = leave.sum(axis=1)
        total_arrive = arrive.sum(axis=2)
        leave_at_a = leave[rows, a]
        # the generic sums wrongly include c in {a, b}; those blocks are handled below
        generic = (total_leave[:, None] - leave_at_a[:, None] - leave
                   + total_arrive - arrive[rows, :, a] - arrive[:, np.arange(K), np.arange(K)])
        pa_a, na_a = p[rows, a], q[rows, a]
        aa = f(pb[a, a] - pa_a, nb[a, a] - na_a) - f(pb[a, a], nb[a, a])
        diag_p, diag_n = np.diag(pb), np.diag(nb)
        bb = f(diag_p[None, :] + p, diag_n[None, :] + q) - f(diag_p, diag_n)[None, :]
        pab, nab = pb[a], nb[a]
        ab = (f(pab - p + pa_a[:, None], nab - q + na_a[:, None]) - f(pab, nab))
        deltas = generic + aa[:, None] + bb + ab
        deltas[rows, a] = 0.0
        return deltas

    def recompute(self):
        lab = self.labels
        onehot = np.zeros((self.n, self.slots))
        onehot[np.arange(self.n), lab] = 1.0
        pb = onehot.T @ self.pos @ onehot
        nb = onehot.T @ self.neg @ onehot
        np.fill_diagonal(pb, np.diag(pb) / 2.0)
        np.fill_diagonal(nb, np.diag(nb) / 2.0)
        return float(np.triu(np.minimum(pb, nb)).sum())


def _candidate_slots(state):
    """Occupied slots in index order, then the first empty slot if any."""
    occupied = np.flatnonzero(state.sizes > 0)
    empty = np.flatnonzero(state.sizes == 0)
    if empty.size:
        return np.append(occupied, empty[0])
    return occupied


def _construct(state, rng):
    for v in rng.permutation(state.n):
        slots = _candidate_slots(state)
        costs = state.insertion_costs(v)[slots]
        i = int(np.argmin(costs))
        state.assign(v, int(slots[i]), float(costs[i]))


def _local_search(state, eps, deadline):
    moves = 0
    while True:
        deltas = state.move_deltas()
        empty = np.flatnonzero(state.sizes == 0)
        if empty.size > 1:
            # every empty slot is the same "new cluster" move
            deltas[:, empty[1:]] = np.inf
        if empty.size:
            # leaving a singleton for a new cluster changes nothing
            singles = state.sizes[state.labels] == 1
            deltas[singles, empty[0]] = np.inf
        flat = int(np.argmin(deltas))
        v, c = divmod(flat, state.slots)
        best = deltas[v, c]
        if not best < -eps:
            return moves
        state.move(int(v), int(c), float(best))
        moves += 1
        if moves & 63 == 0 and time.perf_counter() > deadline:
            return moves


def _kick(state, strength, rng):
    n = state.n
    for v in rng.choice(n, size=min(strength, n), replace=False):
        v = int(v)
        a = state.labels[v]
        slots = [int(c) for c in _candidate_slots(state) if c != a]
        if state.sizes[a] == 1:
            slots = [c for c in slots if state.sizes[c] > 0]
        if not slots:
            continue
        c = slots[int(rng.integers(len(slots)))]
        before = state.value
        state.move(v, c, 0.0)
        state.value = before
    state.value = state.recompute()


def _key(labels):
    return Partition(tuple(int(x) for x in labels)).assignment


def _run(graph, config, kind, slots, initial=None):
    start = time.perf_counter()
    deadline = start + config.time_budget
    weights = ScaledWeights(graph)
    eps = weights.eps
    rng = np.random.default_rng(config.rng_seed)
    make = _CCState if kind == CC else _RCCState
    best_state = None
    iterations = 0
    for restart in range(config.restarts):
        state = make(weights, slots)
        if restart == 0 and initial is not None:
            for v, c in enumerate(initial.assignment):
                state.assign(v, c, 0.0)
            state.value = state.recompute()
        else:
            _construct(state, rng)
        _local_search(state, eps, deadline)
        incumbent = state
        for _ in range(config.max_iterations):
            if time.perf_counter() > deadline:
                break
            iterations += 1
            trial = incumbent.copy()
            _kick(trial, config.perturbation_strength, rng)
            _local_search(trial, eps, deadline)
            if trial.value < incumbent.value - eps:
                incumbent = trial
        # float mode drifts; exact mode is integer-valued and unaffected
        incumbent.value = incumbent.recompute()
        if (best_state is None or incumbent.value < best_state.value - eps
                or (incumbent.value <= best_state.value + eps
                    and _key(incumbent.labels) < _key(best_state.labels))):
            best_state = incumbent
        if time.perf_counter() > deadline:
            break
    return SolveResult(
        partition=Partition(tuple(int(x) for x in best_state.labels)),
        objective=weights.to_objective(best_state.value),
        objective_kind=kind,
        iterations_used=iterations,
        elapsed_seconds=time.perf_counter() - start,
        proven_optimal=False,
        seed=config.rng_seed,
        k_max=config.k_max if kind == RCC else None,
    )


def ils_cc(graph: SignedGraph, config: SolverConfig | None = None,
           initial: Partition | None = None) -> SolveResult:
    config = config or SolverConfig()
    if graph.n == 0:
        return SolveResult(Partition(()), 0.0, CC, 0, 0.0, False, config.rng_seed)
    if initial is not None and initial.n != graph.n:
        raise ValidationError("initial partition does not match the graph")
    return _run(graph, config, CC, graph.n, initial)


def ils_rcc(graph: SignedGraph, config: SolverConfig, initial: Partition | None = None) -> SolveResult:
    """Heuristic RCC with at most ``config.k_max`` clusters.

    ``initial`` (at most ``k_max`` clusters) seeds the first restart, so the
    result is never worse than its relaxed imbalance.
    """
    k = config.k_max
    if k is None or not 1 <= k <= max(graph.n, 1):
        raise ValidationError(f"k_max must be in 1..{graph.n}, got {k}")
    if graph.n == 0:
        return SolveResult(Partition(()), 0.0, RCC, 0, 0.0, False, config.rng_seed, k)
    if initial is not None:
        if initial.n != graph.n:
            raise ValidationError("initial partition does not match the graph")
        if initial.cluster_count > k:
            initial = None
    return _run(graph, config, RCC, k, initial)


def k_sweep(graph: SignedGraph, config: SolverConfig | None = None) -> list[SolveResult]:
    """ILS-CC, then ILS-RCC with ``k`` in ``{k', k'+1, k'+2}`` where ``k'`` is the CC cluster count.

    Each RCC run is seeded with the previous partition, so the relaxed
    imbalance never increases along the sweep and never exceeds the CC
    imbalance.  ``k`` values above ``n`` are clipped to ``n``.
    """
    config = config or SolverConfig()
    cc = ils_cc(graph, config)
    results = [cc]
    previous = cc.partition
    base = max(cc.cluster_count, 1)
    for k in (base, base + 1, base + 2):
        k = min(k, max(graph.n, 1))
        res = ils_rcc(graph, config.with_(k_max=k), initial=previous)
        results.append(res)
        previous = res.partition
    return results
