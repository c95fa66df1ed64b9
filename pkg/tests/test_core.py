import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balancekit import (DomainMismatchError, Partition, SignedGraph, UndefinedPercentError,
                        ValidationError, build_cluster_graph, connected_components, imbalance,
                        imbalance_percent, relaxed_imbalance)
from balancekit.core import giant_component_share

from helpers import TRIANGLE, misplaced_weight, random_graph


def clique(n, sign):
    return SignedGraph.from_signed_weights(
        n, [(i, j, sign * 1.0) for i in range(n) for j in range(i + 1, n)])


@st.composite
def graph_and_partition(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    triples = [(i, j, draw(st.sampled_from([-1, 1])) * draw(st.integers(1, 10)) / 10)
               for i, j in chosen]
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return SignedGraph.from_signed_weights(n, triples), Partition(tuple(labels))


class TestSignedGraph:
    def test_edges_normalised_and_sorted(self):
        g = SignedGraph.from_signed_weights(3, [(2, 0, -0.4), (1, 0, 0.2)])
        assert [(e.u, e.v) for e in g.edges] == [(0, 1), (0, 2)]
        assert g.edges[1].sign == -1 and g.edges[1].weight == 0.4

    @pytest.mark.parametrize("triples", [
        [(0, 0, 0.5)],
        [(0, 1, 0.5), (1, 0, -0.3)],
        [(0, 1, 1.5)],
        [(0, 5, 0.5)],
    ])
    def test_invariants_rejected(self, triples):
        with pytest.raises(ValidationError):
            SignedGraph.from_signed_weights(3, triples)

    def test_zero_weight_rejected(self):
        with pytest.raises(ValidationError):
            SignedGraph.from_signed_weights(2, [(0, 1, 0.0)])

    def test_induced_subgraph(self):
        sub = TRIANGLE.induced_subgraph([2, 0])
        assert sub.n == 2
        assert [(e.u, e.v, e.weight, e.sign) for e in sub.edges] == [(0, 1, 0.5, -1)]
        assert sub.labels == ("2", "0")


class TestPartition:
    def test_canonical_form(self):
        assert Partition((5, 5, 2, 7, 2)).assignment == (0, 0, 1, 2, 1)
        assert Partition((1, 0)) == Partition((0, 1))

    def test_from_clusters(self):
        p = Partition.from_clusters(4, [[3, 1], [0, 2]])
        assert p.assignment == (0, 1, 0, 1)
        assert p.clusters() == [(0, 2), (1, 3)]

    def test_from_clusters_must_be_total(self):
        with pytest.raises(ValidationError):
            Partition.from_clusters(3, [[0], [1]])
        with pytest.raises(ValidationError):
            Partition.from_clusters(2, [[0, 1], [1]])


class TestImbalance:
    def test_all_positive_single_cluster(self):
        assert imbalance(clique(5, 1), Partition.single(5)) == 0.0

    def test_all_negative_singletons(self):
        assert imbalance(clique(5, -1), Partition.singletons(5)) == 0.0

    def test_triangle(self):
        assert imbalance(TRIANGLE, Partition.single(3)) == 0.5
        assert imbalance(TRIANGLE, Partition.from_clusters(3, [[0, 1], [2]])) == 1.0

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatchError):
            imbalance(TRIANGLE, Partition.single(4))
        with pytest.raises(DomainMismatchError):
            relaxed_imbalance(TRIANGLE, Partition.single(2))


class TestRelaxedImbalance:
    def test_negative_clique_single_cluster(self):
        assert relaxed_imbalance(clique(4, -1), Partition.single(4)) == 0.0

    def test_positive_bridge_between_two_clusters(self):
        g = SignedGraph.from_signed_weights(4, [(0, 1, 1), (2, 3, 1), (0, 2, 0.7), (1, 3, 0.2)])
        assert relaxed_imbalance(g, Partition((0, 0, 1, 1))) == 0.0
        assert imbalance(g, Partition((0, 0, 1, 1))) == pytest.approx(0.9)

    def test_triangle(self):
        assert relaxed_imbalance(TRIANGLE, Partition.single(3)) == 0.5
        assert relaxed_imbalance(TRIANGLE, Partition.from_clusters(3, [[0, 1], [2]])) == 0.5


class TestImbalancePercent:
    def test_zero(self):
        assert imbalance_percent(TRIANGLE, 0.0) == 0.0

    def test_definition(self):
        g10 =SignedGraph.from_signed_weights(10, [(i, i + 1, 1.0) for i in range(9)] + [(0, 9, 1.0)])
        assert imbalance_percent(g10, 2.5) == 25.0

    def test_empty_graph(self):
        with pytest.raises(UndefinedPercentError):
            imbalance_percent(SignedGraph(3), 0.0)


class TestClusterGraph:
    def test_single_cluster(self):
        cg = build_cluster_graph(TRIANGLE, Partition.single(3))
        assert len(cg.clusters) == 1 and cg.pair_weights == {}
        assert cg.clusters[0].internal_pos_weight == 2.0
        assert cg.clusters[0].internal_neg_weight == 0.5

    def test_singletons(self):
        cg = build_cluster_graph(TRIANGLE, Partition.singletons(3))
        assert all(c.internal_pos_weight == c.internal_neg_weight == 0 for c in cg.clusters)
        assert cg.pair_weights == {(0, 1): (1.0, 0.0), (0, 2): (0.0, 0.5), (1, 2): (1.0, 0.0)}

    def test_triangle_split(self):
        cg = build_cluster_graph(TRIANGLE, Partition.from_clusters(3, [[0, 1], [2]]))
        assert (cg.clusters[0].internal_pos_weight, cg.clusters[0].internal_neg_weight) == (1.0, 0.0)
        assert cg.pair_weights == {(0, 1): (1.0, 0.5)}
        assert cg.total_graph_weight == 2.5
        assert cg.proportion(1.0) == 0.4


class TestComponents:
    def test_empty(self):
        assert connected_components(SignedGraph(0)) == []

    def test_path(self):
        g = SignedGraph.from_signed_weights(4, [(0, 1, 1), (1, 2, -1), (2, 3, 0.5)])
        assert connected_components(g) == [{0, 1, 2, 3}]

    def test_two_edges(self):
        g = SignedGraph.from_signed_weights(4, [(0, 1, 1), (2, 3, -1)])
        comps = connected_components(g)
        assert [len(c) for c in comps] == [2, 2]
        assert giant_component_share(g) == 0.5

    def test_isolated_vertices_and_order(self):
        g = SignedGraph.from_signed_weights(6, [(3, 4, 1), (4, 5, 1)])
        assert connected_components(g) == [{3, 4, 5}, {0}, {1}, {2}]


@settings(max_examples=200, deadline=None)
@given(graph_and_partition())
def test_imbalance_matches_edge_definition(gp):
    g, p = gp
    assert imbalance(g, p) == pytest.approx(misplaced_weight(g, p.assignment), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(graph_and_partition())
def test_relaxed_bounded_by_imbalance(gp):
    g, p = gp
    ri = relaxed_imbalance(g, p)
    assert 0.0 <= ri <= imbalance(g, p) + 1e-12


@settings(max_examples=100, deadline=None)
@given(graph_and_partition(), st.randoms(use_true_random=False))
def test_relabeling_invariance(gp, rnd):
    g, p = gp
    perm = list(range(g.n))
    rnd.shuffle(perm)
    g2 = SignedGraph.from_signed_weights(
        g.n, [(perm[e.u], perm[e.v], e.sign * e.weight) for e in g.edges])
    labels = [0] * g.n
    for v, c in enumerate(p.assignment):
        labels[perm[v]] = c + 17
    p2 = Partition(tuple(labels))
    assert imbalance(g2, p2) == pytest.approx(imbalance(g, p), abs=1e-9)
    assert relaxed_imbalance(g2, p2) == pytest.approx(relaxed_imbalance(g, p), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(graph_and_partition(), st.sampled_from([0.25, 0.5, 0.8]))
def test_weight_scaling(gp, c):
    g, p = gp
    scaled = SignedGraph.from_signed_weights(g.n, [(e.u, e.v, c * e.sign * e.weight) for e in g.edges])
    assert imbalance(scaled, p) == pytest.approx(c * imbalance(g, p), abs=1e-9)
    assert relaxed_imbalance(scaled, p) == pytest.approx(c * relaxed_imbalance(g, p), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(graph_and_partition())
def test_cluster_graph_conservation(gp):
    g, p = gp
    cg = build_cluster_graph(g, p)
    assert math.isclose(cg.stored_weight(), cg.total_graph_weight, rel_tol=1e-9, abs_tol=1e-12)
    assert all(min(pw) >= 0 for pw in cg.pair_weights.values())


def test_components_cover_vertices():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_graph(rng, 12, density=0.15)
        comps = connected_components(g)
        assert set().union(*comps) == set(range(12))
        assert sum(len(c) for c in comps) == 12
        sizes = [len(c) for c in comps]
        assert sizes == sorted(sizes, reverse=True)
