"""Text formats for graphs, partitions and cluster graphs.

Edge list::

    # vertices=<n>
    u<TAB>v<TAB>signed_weight

Partition::

    vertex_id<TAB>cluster_id
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from .core import ClusterGraph, Partition, SignedGraph
from .errors import FormatError

_HEADER = re.compile(r"#\s*vertices\s*=\s*(\d+)\s*$")


def format_weight(x: float) -> str:
    # repr is the shortest string that round-trips a double
    return repr(float(x))


def graph_to_text(graph: SignedGraph) -> str:
    lines = [f"# vertices={graph.n}"]
    for e in graph.edges:
        lines.append(f"{e.u}\t{e.v}\t{format_weight(e.sign * e.weight)}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str, labels=()) -> SignedGraph:
    n = None
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m and n is None:
                n = int(m.group(1))
            continue
        if n is None:
            raise FormatError("missing '# vertices=<n>' header before first edge", lineno)
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
        try:
            u, v, sw = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        triples.append((u, v, sw))
    if n is None:
        raise FormatError("missing '# vertices=<n>' header")
    try:
        return SignedGraph.from_signed_weights(n, triples, labels)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_graph(graph: SignedGraph, path) -> None:
    Path(path).write_text(graph_to_text(graph), encoding="utf-8")


def read_graph(path, labels=()) -> SignedGraph:
    return graph_from_text(Path(path).read_text(encoding="utf-8"), labels)


def partition_to_text(partition: Partition) -> str:
    return "".join(f"{v}\t{c}\n" for v, c in enumerate(partition.assignment))


def partition_from_text(text: str) -> Partition:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(f"expected 2 tab-separated fields, got {len(parts)}", lineno)
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if v in pairs:
            raise FormatError(f"vertex {v} listed twice", lineno)
        pairs[v] = c
    n = len(pairs)
    if sorted(pairs) != list(range(n)):
        raise FormatError(f"vertex ids must be exactly 0..{n - 1}")
    return Partition(tuple(pairs[v] for v in range(n)))


def write_partition(partition: Partition, path) -> None:
    Path(path).write_text(partition_to_text(partition), encoding="utf-8")


def read_partition(path) -> Partition:
    return partition_from_text(Path(path).read_text(encoding="utf-8"))


def cluster_graph_to_dict(cg: ClusterGraph, labels=None) -> dict:
    clusters = []
    for i, c in enumerate(cg.clusters):
        entry = {
            "id": i,
            "members": list(c.members),
            "internal_pos_weight": c.internal_pos_weight,
            "internal_neg_weight": c.internal_neg_weight,
            "internal_pos_proportion": cg.proportion(c.internal_pos_weight),
            "internal_neg_proportion": cg.proportion(c.internal_neg_weight),
        }
        if labels is not None:
            entry["member_labels"] = [labels[v] for v in c.members]
        clusters.append(entry)
    pairs = [
        {"clusters": [i, j], "pos_weight": p, "neg_weight": q,
         "pos_proportion": cg.proportion(p), "neg_proportion": cg.proportion(q)}
        for (i, j), (p, q) in cg.pair_weights.items()
    ]
    return {"clusters": clusters, "pair_weights": pairs,
            "total_graph_weight": cg.total_graph_weight}


def cluster_graph_to_json(cg: ClusterGraph, labels=None) -> str:
    return json.dumps(cluster_graph_to_dict(cg, labels), indent=2) + "\n"


def _pie(pos: float, neg: float) -> str:
    total = pos + neg
    if total == 0.0:
        return "white"
    p = pos / total
    return f"green;{p:.4f}:red;{1.0 - p:.4f}"


def cluster_graph_to_dot(cg: ClusterGraph, name: str = "clusters") -> str:
    """Graphviz rendering: each cluster is a pie of its internal sign proportions.

    Positive aggregate edges are green, negative ones red; labels carry the
    proportion of total graph weight.
    """
    lines = [f"graph {json.dumps(name)} {{", "  node [shape=circle, style=wedged];"]
    for i, c in enumerate(cg.clusters):
        pp = cg.proportion(c.internal_pos_weight)
        nq = cg.proportion(c.internal_neg_weight)
        lines.append(
            f'  c{i} [label="C{i} ({len(c.members)})\\n+{pp:.2%} / -{nq:.2%}", '
            f'fillcolor="{_pie(c.internal_pos_weight, c.internal_neg_weight)}", '
            f'pos_proportion={pp:.6f}, neg_proportion={nq:.6f}, size={len(c.members)}];')
    for (i, j), (p, q) in cg.pair_weights.items():
        if p > 0.0:
            lines.append(f'  c{i} -- c{j} [color=green, label="+{cg.proportion(p):.2%}", '
                         f'proportion={cg.proportion(p):.6f}];')
        if q > 0.0:
            lines.append(f'  c{i} -- c{j} [color=red, label="-{cg.proportion(q):.2%}", '
                         f'proportion={cg.proportion(q):.6f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
