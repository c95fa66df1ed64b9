"""Structural balance analysis of signed networks extracted from roll-call votes."""
from .core import (
    NEGATIVE, POSITIVE, ClusterGraph, ClusterNode, Edge, Partition, SignedGraph,
    build_cluster_graph, connected_components, imbalance, imbalance_percent,
    relaxed_imbalance,
)
from .errors import (
    BalanceKitError, DomainMismatchError, EmptySelectionError, FormatError,
    UndefinedPercentError, ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "NEGATIVE", "POSITIVE", "ClusterGraph", "ClusterNode", "Edge", "Partition", "SignedGraph",
    "build_cluster_graph", "connected_components", "imbalance", "imbalance_percent",
    "relaxed_imbalance",
    "BalanceKitError", "DomainMismatchError", "EmptySelectionError", "FormatError",
    "UndefinedPercentError", "ValidationError",
]
