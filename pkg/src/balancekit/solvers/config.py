from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..core import Partition, SignedGraph
from ..errors import FormatError, ValidationError

CC = "CC"
RCC = "RCC"


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by the exact solver and both ILS variants."""

    max_iterations: int = 1000
    perturbation_strength: int = 3
    restarts: int = 4
    time_budget: float = 3600.0
    rng_seed: int = 42
    k_max: int | None = None

    def __post_init__(self):
        for name in ("max_iterations", "perturbation_strength", "restarts"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.time_budget > 0:
            raise ValidationError(f"time_budget must be > 0, got {self.time_budget}")
        if self.k_max is not None and self.k_max < 1:
            raise ValidationError(f"k_max must be >= 1, got {self.k_max}")

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    @classmethod
    def from_text(cls, text: str, base: "SolverConfig | None" = None) -> "SolverConfig":
        """Parse ``key = value`` lines (``#`` comments allowed) on top of ``base``."""
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            parser.read_string("[solver]\n" + text)
        except configparser.Error as exc:
            raise FormatError(f"bad solver config: {exc}") from None
        known = {f.name: f for f in fields(cls)}
        changes = {}
        for key, raw in parser["solver"].items():
            if key not in known:
                raise FormatError(f"unknown solver config key {key!r}; known: {', '.join(known)}")
            try:
                if key == "time_budget":
                    changes[key] = float(raw)
                elif key == "k_max" and raw.strip().lower() in ("", "none"):
                    changes[key] = None
                else:
                    changes[key] = int(raw)
            except ValueError:
                raise FormatError(f"bad value for {key}: {raw!r}") from None
        return replace(base or cls(), **changes)

    @classmethod
    def from_file(cls, path, base=None) -> "SolverConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"), base)


@dataclass(frozen=True)
class SolveResult:
    partition: Partition
    objective: float
    objective_kind: str
    iterations_used: int
    elapsed_seconds: float
    proven_optimal: bool
    seed: int | None = None
    k_max: int | None = None

    @property
    def cluster_count(self) -> int:
        return self.partition.cluster_count

    def envelope(self) -> dict:
        d = asdict(self)
        d.pop("partition")
        d["cluster_count"] = self.cluster_count
        return d


class ScaledWeights:
    """Edge weights prepared for the solvers.

    When every weight is a small-denominator rational, weights are scaled by
    the common denominator so that all sums are exact integers held in
    doubles; comparisons then need no tolerance.  Otherwise the raw weights
    are used together with a small absolute tolerance.
    """

    MAX_DENOMINATOR = 10_000
    MAX_SCALE = 1 << 30

    def __init__(self, graph: SignedGraph):
        self.graph = graph
        self.scale = self._common_denominator(graph)
        self.exact = self.scale is not None
        factor = float(self.scale) if self.exact else 1.0
        self.pos = graph.positive_matrix * factor
        self.neg = graph.negative_matrix * factor
        if self.exact:
            self.pos = np.rint(self.pos)
            self.neg = np.rint(self.neg)
            self.eps = 0.0
        else:
            self.eps = 1e-9 * max(1.0, graph.total_weight())

    @classmethod
    def _common_denominator(cls, graph):
        scale = 1
        for e in graph.edges:
            frac = Fraction(e.weight).limit_denominator(cls.MAX_DENOMINATOR)
            if float(frac) != e.weight:
                return None
            scale = math.lcm(scale, frac.denominator)
            if scale > cls.MAX_SCALE:
                return None
        if graph.total_weight() * scale >= 2.0 ** 52:
            return None
        return scale

    def to_objective(self, value: float) -> float:
        """Map an internal objective back to the graph's weight units."""
        if self.exact:
            return float(Fraction(int(round(value)), self.scale))
        return float(value)

    def cc_value(self, labels) -> float:
        lab = np.asarray(labels)
        same = lab[:, None] == lab[None, :]
        internal_neg = np.where(same, self.neg, 0.0).sum()
        external_pos = np.where(same, 0.0, self.pos).sum()
        return float((internal_neg + external_pos) / 2.0)

    def rcc_value(self, labels) -> float:
        lab = np.asarray(labels)
        k = int(lab.max()) + 1 if lab.size else 0
        onehot = np.zeros((lab.size, k))
        onehot[np.arange(lab.size), lab] = 1.0
        pb = onehot.T @ self.pos @ onehot
        nb = onehot.T @ self.neg @ onehot
        # diagonal blocks count each internal edge twice
        np.fill_diagonal(pb, np.diag(pb) / 2.0)
        np.fill_diagonal(nb, np.diag(nb) / 2.0)
        return float(np.triu(np.minimum(pb, nb)).sum())


def better(a: float, b: float, eps: float) -> bool:
    """``a`` strictly improves on ``b``."""
    return a < b - eps
