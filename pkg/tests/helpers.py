"""Graph generators and independent oracles shared by the test modules."""
from __future__ import annotations

from datetime import date
from fractions import Fraction
from pathlib import Path

import numpy as np
from sympy.utilities.iterables import multiset_partitions

from balancekit import Partition, SignedGraph
from balancekit.extraction import Mep, Text, VoteTable, VoteValue

DATA = Path(__file__).parent / "data"

F, A, S, X = VoteValue.FOR, VoteValue.AGAINST, VoteValue.ABSTENTION, VoteValue.ABSENT


def make_table(rows, domain="AGRI", day=date(2012, 9, 1)):
    """``rows``: one list of votes per MEP, aligned on texts."""
    meps = [Mep(f"m{i}", f"name{i}", "FR", "EPP") for i in range(len(rows))]
    texts = [Text(f"t{j}", domain, day) for j in range(len(rows[0]))]
    votes = {(m.mep_id, t.text_id): v for m, row in zip(meps, rows) for t, v in zip(texts, row)
             if v is not X}
    return VoteTable(meps, texts, votes)


def random_table(rng, n_meps, n_texts, factions=2, loyalty=0.8):
    faction = rng.integers(0, factions, size=n_meps)
    line = rng.choice([F, A], size=(factions, n_texts))
    rows = []
    for i in range(n_meps):
        row = []
        for j in range(n_texts):
            r = rng.random()
            if r < 0.15:
                row.append(X)
            elif r < 0.25:
                row.append(S)
            elif r < 0.25 + 0.75 * loyalty:
                row.append(line[faction[i], j])
            else:
                row.append(F if line[faction[i], j] is A else A)
        rows.append(row)
    return make_table(rows)


TRIANGLE = SignedGraph.from_signed_weights(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -0.5)])


def random_graph(rng, n, density=0.5, positive=0.5, decimals=True):
    """Random signed graph; weights drawn from {0.1, ..., 1.0} when ``decimals``."""
    triples = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = rng.integers(1, 11) / 10 if decimals else rng.uniform(0.01, 1.0)
                triples.append((i, j, w if rng.random() < positive else -w))
    return SignedGraph.from_signed_weights(n, triples)


def planted_graph(rng, n, k, density=0.6, noise=0.1):
    """Signed graph with ``k`` planted factions: positive inside, negative across, sign noise."""
    group = rng.integers(0, k, size=n)
    triples = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                w = rng.integers(1, 11) / 10
                sign = 1 if group[i] == group[j] else -1
                if rng.random() < noise:
                    sign = -sign
                triples.append((i, j, sign * w))
    return SignedGraph.from_signed_weights(n, triples)


def balanced_graph(rng, n, k, density=0.7):
    return planted_graph(rng, n, k, density, noise=0.0)


def random_partition(rng, n, k_max=None):
    k_max = k_max or n
    return Partition(tuple(int(x) for x in rng.integers(0, k_max, size=n)))


def misplaced_weight(graph, labels):
    """Per-edge definition of the imbalance: frustrated edge weights, summed."""
    total = 0.0
    for e in graph.edges:
        together = labels[e.u] == labels[e.v]
        if (e.sign > 0 and not together) or (e.sign < 0 and together):
            total += e.weight
    return total


def exact_misplaced(graph, labels):
    """Misplaced weight in rational arithmetic, reading weights as decimals."""
    total = Fraction(0)
    for e in graph.edges:
        together = labels[e.u] == labels[e.v]
        if (e.sign > 0 and not together) or (e.sign < 0 and together):
            total += Fraction(repr(e.weight))
    return total


def exact_relaxed(graph, labels):
    """Relaxed imbalance in rational arithmetic, by explicit block bookkeeping."""
    blocks = {}
    for e in graph.edges:
        key = tuple(sorted((labels[e.u], labels[e.v])))
        pos, neg = blocks.get(key, (Fraction(0), Fraction(0)))
        w = Fraction(repr(e.weight))
        blocks[key] = (pos + w, neg) if e.sign > 0 else (pos, neg + w)
    return sum((min(p, q) for p, q in blocks.values()), Fraction(0))


def all_partitions(n):
    """Every set partition of ``range(n)`` as a label tuple (sympy enumeration)."""
    if n == 0:
        yield ()
        return
    for blocks in multiset_partitions(list(range(n))):
        labels = [0] * n
        for c, block in enumerate(blocks):
            for v in block:
                labels[v] = c
        yield tuple(labels)


def oracle_cc(graph):
    """Minimum imbalance by enumeration, exact rational value."""
    return min(exact_misplaced(graph, lab) for lab in all_partitions(graph.n))


def oracle_rcc(graph, k_max):
    return min(exact_relaxed(graph, lab) for lab in all_partitions(graph.n)
               if (max(lab) + 1 if lab else 0) <= k_max)


def oracle_nmi(a, b):
    from sklearn.metrics import normalized_mutual_info_score
    return normalized_mutual_info_score(list(a.assignment), list(b.assignment),
                                        average_method="arithmetic")


def cluster_gains(graph, partition, objective, k_max=None):
    """Objective after every single-vertex relocation (existing clusters or a new one)."""
    labels = list(partition.assignment)
    k = partition.cluster_count
    out = []
    for v in range(graph.n):
        targets = list(range(k))
        if k_max is None or k < k_max:
            targets.append(k)
        for c in targets:
            if c == labels[v]:
                continue
            trial = labels.copy()
            trial[v] = c
            out.append(objective(graph, Partition(tuple(trial))))
    return out


def rng(seed=0):
    return np.random.default_rng(seed)
