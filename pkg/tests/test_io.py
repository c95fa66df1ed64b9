import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balancekit import FormatError, Partition, SignedGraph, build_cluster_graph
from balancekit import io as bio

from helpers import TRIANGLE, random_graph


def test_graph_text_format():
    assert bio.graph_to_text(TRIANGLE) == "# vertices=3\n0\t1\t1.0\n0\t2\t-0.5\n1\t2\t1.0\n"


def test_isolated_vertices_survive_round_trip(tmp_path):
    g = SignedGraph.from_signed_weights(5, [(0, 1, -0.42)])
    bio.write_graph(g, tmp_path / "g.graph")
    back = bio.read_graph(tmp_path / "g.graph")
    assert back == g and back.n == 5


def test_graph_round_trip_random(tmp_path):
    rng = np.random.default_rng(0)
    for i in range(10):
        g = random_graph(rng, 15, decimals=False)
        bio.write_graph(g, tmp_path / f"{i}.graph")
        assert bio.read_graph(tmp_path / f"{i}.graph") == g


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=0, max_size=12))
def test_partition_round_trip(labels):
    p = Partition(tuple(labels))
    assert bio.partition_from_text(bio.partition_to_text(p)) == p


@pytest.mark.parametrize("text, line", [
    ("0\t1\t0.5\n", 1),
    ("# vertices=2\n0\t1\n", 2),
    ("# vertices=2\n0\t1\tabc\n", 2),
    ("# vertices=2\n0\t1\t0.5\n1\t0\t0.5\n", None),
])
def test_graph_parse_errors(text, line):
    with pytest.raises(FormatError) as err:
        bio.graph_from_text(text)
    assert err.value.line == line


def test_partition_parse_errors():
    with pytest.raises(FormatError):
        bio.partition_from_text("0\t0\n2\t1\n")
    with pytest.raises(FormatError):
        bio.partition_from_text("0\t0\n0\t1\n")


def test_cluster_graph_json_mirrors_type():
    cg = build_cluster_graph(TRIANGLE, Partition((0, 0, 1)))
    doc = json.loads(bio.cluster_graph_to_json(cg, labels=["a", "b", "c"]))
    assert doc["total_graph_weight"] == 2.5
    assert doc["clusters"][0]["members"] == [0, 1]
    assert doc["clusters"][0]["member_labels"] == ["a", "b"]
    assert doc["clusters"][0]["internal_pos_proportion"] == 0.4
    assert doc["pair_weights"] == [{"clusters": [0, 1], "pos_weight": 1.0, "neg_weight": 0.5,
                                    "pos_proportion": 0.4, "neg_proportion": 0.2}]


def test_dot_colors():
    cg = build_cluster_graph(TRIANGLE, Partition((0, 0, 1)))
    dot = bio.cluster_graph_to_dot(cg)
    assert "c0 -- c1 [color=green" in dot
    assert "c0 -- c1 [color=red" in dot
    assert 'fillcolor="green;1.0000:red;0.0000"' in dot


def test_dot_single_cluster_has_no_edges():
    dot = bio.cluster_graph_to_dot(build_cluster_graph(TRIANGLE, Partition.single(3)))
    assert dot.count("--") == 0
    assert dot.count("[label=") == 1
