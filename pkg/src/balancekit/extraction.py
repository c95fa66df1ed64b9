"""From roll-call records to filtered signed graphs.

The pipeline has four steps: select a slice of the vote table, average the
per-text agreement of every pair of active MEPs, zero the similarities that
sit close to zero, and turn what is left into a signed graph.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import NEGATIVE, POSITIVE, Edge, SignedGraph
from .errors import EmptySelectionError, FormatError, ValidationError

CSV_COLUMNS = ("mep_id", "name", "country", "group", "text_id", "domain", "date", "vote")


class VoteValue(enum.Enum):
    FOR = "FOR"
    AGAINST = "AGAINST"
    ABSTENTION = "ABSTENTION"
    ABSENT = "ABSENT"


# numeric coding used by the vectorised similarity; ABSENT is NaN
_CODE = {VoteValue.FOR: 1.0, VoteValue.AGAINST: -1.0,
         VoteValue.ABSTENTION: 0.0, VoteValue.ABSENT: np.nan}


@dataclass(frozen=True)
class Mep:
    mep_id: str
    name: str
    country: str
    group: str


@dataclass(frozen=True)
class Text:
    text_id: str
    domain: str
    date: date


@dataclass
class VoteTable:
    meps: list[Mep]
    texts: list[Text]
    votes: dict[tuple[str, str], VoteValue] = field(default_factory=dict)

    def vote(self, mep_id: str, text_id: str) -> VoteValue:
        return self.votes.get((mep_id, text_id), VoteValue.ABSENT)

    @property
    def domains(self) -> list[str]:
        return sorted({t.domain for t in self.texts})

    @property
    def groups(self) -> list[str]:
        return sorted({m.group for m in self.meps})

    @property
    def countries(self) -> list[str]:
        return sorted({m.country for m in self.meps})

    def vote_codes(self) -> np.ndarray:
        """``len(meps) x len(texts)`` matrix: +1 FOR, -1 AGAINST, 0 ABSTENTION, NaN ABSENT."""
        codes = np.full((len(self.meps), len(self.texts)), np.nan)
        row = {m.mep_id: i for i, m in enumerate(self.meps)}
        col = {t.text_id: j for j, t in enumerate(self.texts)}
        for (mid, tid), val in self.votes.items():
            if mid in row and tid in col:
                codes[row[mid], col[tid]] = _CODE[val]
        return codes

    def active_meps(self) -> list[Mep]:
        """MEPs who cast at least one non-ABSENT vote on the table's texts."""
        if not self.texts:
            return []
        present = ~np.isnan(self.vote_codes())
        return [m for m, ok in zip(self.meps, present.any(axis=1)) if ok]


@dataclass(frozen=True)
class Selection:
    """Restriction of a vote table along its four dimensions; ``None`` keeps everything."""

    domains: tuple[str, ...] | None = None
    groups: tuple[str, ...] | None = None
    countries: tuple[str, ...] | None = None
    date_range: tuple[date, date] | None = None

    def is_empty(self) -> bool:
        return all(x is None for x in (self.domains, self.groups, self.countries, self.date_range))

    def describe(self) -> dict:
        return {
            "domains": list(self.domains) if self.domains is not None else None,
            "groups": list(self.groups) if self.groups is not None else None,
            "countries": list(self.countries) if self.countries is not None else None,
            "date_range": ([d.isoformat() for d in self.date_range]
                           if self.date_range is not None else None),
        }


def parliamentary_year(start_year: int, start_month: int = 7) -> tuple[date, date]:
    """Inclusive date range of the parliamentary year beginning in ``start_year``.

    Years run from the first day of ``start_month`` to the day before the same
    date one year later (July 1 to June 30 by default).
    """
    start = date(start_year, start_month, 1)
    nxt = date(start_year + 1, start_month, 1)
    return start, date.fromordinal(nxt.toordinal() - 1)


def _check_labels(kind: str, wanted: Iterable[str] | None, known: Sequence[str]):
    if wanted is None:
        return
    unknown = sorted(set(wanted) - set(known))
    if unknown:
        raise ValidationError(
            f"unknown {kind} {unknown}; known {kind}: {', '.join(known) or '(none)'}")


def select(table: VoteTable, selection: Selection | None = None) -> VoteTable:
    """Restrict ``table`` and keep only MEPs active in the restriction."""
    selection = selection or Selection()
    _check_labels("domains", selection.domains, table.domains)
    _check_labels("groups", selection.groups, table.groups)
    _check_labels("countries", selection.countries, table.countries)
    texts = table.texts
    if selection.domains is not None:
        texts = [t for t in texts if t.domain in selection.domains]
    if selection.date_range is not None:
        lo, hi = selection.date_range
        if lo > hi:
            raise ValidationError(f"empty date range {lo}..{hi}")
        texts = [t for t in texts if lo <= t.date <= hi]
    meps = table.meps
    if selection.groups is not None:
        meps = [m for m in meps if m.group in selection.groups]
    if selection.countries is not None:
        meps = [m for m in meps if m.country in selection.countries]
    text_ids = {t.text_id for t in texts}
    mep_ids = {m.mep_id for m in meps}
    votes = {k: v for k, v in table.votes.items() if k[0] in mep_ids and k[1] in text_ids}
    restricted = VoteTable(list(meps), list(texts), votes)
    active = restricted.active_meps()
    if len(active) != len(meps):
        keep = {m.mep_id for m in active}
        restricted = VoteTable(active, list(texts),
                               {k: v for k, v in votes.items() if k[0] in keep})
    return restricted


def text_similarity(vote_u: VoteValue, vote_v: VoteValue) -> int | None:
    """Agreement of two MEPs on one text; ``None`` when the text is excluded."""
    if VoteValue.ABSENT in (vote_u, vote_v):
        return None
    if VoteValue.ABSTENTION in (vote_u, vote_v):
        return 0
    return 1 if vote_u == vote_v else -1


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise average similarities; ``NaN`` marks pairs without a common text.

    The diagonal is unused and always ``NaN``.
    """

    mep_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        n = len(self.mep_ids)
        if vals.shape != (n, n):
            raise ValidationError(f"matrix shape {vals.shape} does not match {n} MEPs")
        np.fill_diagonal(vals, np.nan)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mep_ids", tuple(self.mep_ids))

    @property
    def size(self) -> int:
        return len(self.mep_ids)

    def pair_values(self) -> np.ndarray:
        """Upper-triangle entries (one per unordered pair), ``NaN`` included."""
        iu = np.triu_indices(self.size, 1)
        return self.values[iu]

    def defined_values(self) -> np.ndarray:
        vals = self.pair_values()
        return vals[~np.isnan(vals)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["mep_id", *self.mep_ids])
        for mid, row in zip(self.mep_ids, self.values):
            writer.writerow([mid, *("NA" if np.isnan(x) else repr(float(x)) for x in row)])
        return buf.getvalue()

    def __eq__(self, other):
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return (self.mep_ids == other.mep_ids
                and np.array_equal(self.values, other.values, equal_nan=True))

    __hash__ = None


def similarity_matrix(table: VoteTable) -> SimilarityMatrix:
    """Average per-text agreement between every pair of active MEPs."""
    active = table.active_meps()
    if not active:
        raise EmptySelectionError("vote table has no active MEP")
    if len(active) != len(table.meps):
        keep = {m.mep_id for m in active}
        table = VoteTable(active, table.texts,
                          {k: v for k, v in table.votes.items() if k[0] in keep})
    codes = table.vote_codes()
    present = (~np.isnan(codes)).astype(float)
    # product of codes reproduces text_similarity on non-excluded texts
    filled = np.nan_to_num(codes, nan=0.0)
    total = filled @ filled.T
    count = present @ present.T
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(count > 0, total / np.where(count > 0, count, 1.0), np.nan)
    return SimilarityMatrix(tuple(m.mep_id for m in active), sim)


@dataclass(frozen=True)
class FilterThresholds:
    theta_minus: float = 0.0
    theta_plus: float = 0.0

    def __post_init__(self):
        if not (-1.0 <= self.theta_minus <= 0.0 <= self.theta_plus <= 1.0):
            raise ValidationError(
                f"thresholds must satisfy -1 <= theta_minus <= 0 <= theta_plus <= 1, "
                f"got ({self.theta_minus}, {self.theta_plus})")


def two_means_1d(values: Sequence[float]) -> tuple[float, float]:
    """Lloyd's 2-means on a line, centroids seeded at the extremes.

    Returns ``(low_centroid, high_centroid)``.  Requires at least two distinct
    values.
    """
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0 or x[0] == x[-1]:
        raise ValidationError("2-means needs at least two distinct values")
    lo, hi = x[0], x[-1]
    split = -1
    while True:
        # clusters are contiguous on sorted data: everything above the midpoint is high
        new_split = int(np.searchsorted(x, (lo + hi) / 2.0, side="right"))
        if new_split == split:
            return float(lo), float(hi)
        split = new_split
        lo, hi = float(x[:split].mean()), float(x[split:].mean())


def _side_threshold(values: np.ndarray) -> float:
    if np.unique(values).size < 2:
        return 0.0
    lo, hi = two_means_1d(values)
    return (lo + hi) / 2.0


def compute_thresholds(matrix: SimilarityMatrix) -> FilterThresholds:
    vals = matrix.defined_values()
    return FilterThresholds(_side_threshold(vals[vals < 0]), _side_threshold(vals[vals > 0]))


def apply_filter(matrix: SimilarityMatrix, thresholds: FilterThresholds) -> SimilarityMatrix:
    """Zero the entries in ``]theta_minus, 0[`` and ``[0, theta_plus[``."""
    vals = np.array(matrix.values)
    tm, tp = thresholds.theta_minus, thresholds.theta_plus
    with np.errstate(invalid="ignore"):
        central = ((vals > tm) & (vals < 0.0)) | ((vals >= 0.0) & (vals < tp))
    vals[central] = 0.0
    return SimilarityMatrix(matrix.mep_ids, vals)


def build_graph(matrix: SimilarityMatrix, labels: Sequence[str] | None = None) -> SignedGraph:
    """One vertex per MEP, one edge per defined non-zero similarity."""
    n = matrix.size
    iu, ju = np.triu_indices(n, 1)
    vals = matrix.values[iu, ju]
    keep = ~np.isnan(vals) & (vals != 0.0)
    edges = tuple(Edge(int(i), int(j), float(abs(s)), POSITIVE if s > 0 else NEGATIVE)
                  for i, j, s in zip(iu[keep], ju[keep], vals[keep]))
    return SignedGraph(n, edges, tuple(labels) if labels is not None else matrix.mep_ids)


def extract(table: VoteTable, selection: Selection | None = None, filtering: bool = True):
    """Run the four steps; returns ``(graph, raw_matrix, thresholds, selected_table)``.

    With ``filtering=False`` the thresholds are ``(0, 0)`` and nothing is removed.
    """
    selected = select(table, selection)
    if not selected.meps:
        raise EmptySelectionError("selection kept no active MEP")
    raw = similarity_matrix(selected)
    thresholds = compute_thresholds(raw) if filtering else FilterThresholds(0.0, 0.0)
    graph = build_graph(apply_filter(raw, thresholds))
    return graph, raw, thresholds, selected


def read_votes_csv(source) -> VoteTable:
    """Parse the long vote format, one ``(mep, text)`` vote per row."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty vote file", 1) from None
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise FormatError(f"header must be {','.join(CSV_COLUMNS)}", 1)
    meps: dict[str, Mep] = {}
    texts: dict[str, Text] = {}
    votes: dict[tuple[str, str], VoteValue] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise FormatError(f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", lineno)
        mep_id, name, country, group, text_id, domain, day, vote = (c.strip() for c in row)
        if not mep_id or not text_id:
            raise FormatError("mep_id and text_id must be non-empty", lineno)
        try:
            value = VoteValue(vote.upper())
        except ValueError:
            raise FormatError(f"unknown vote value {vote!r}", lineno) from None
        try:
            when = date.fromisoformat(day)
        except ValueError:
            raise FormatError(f"invalid ISO date {day!r}", lineno) from None
        mep = Mep(mep_id, name, country, group)
        if meps.setdefault(mep_id, mep) != mep:
            raise FormatError(f"conflicting metadata for MEP {mep_id}", lineno)
        txt = Text(text_id, domain, when)
        if texts.setdefault(text_id, txt) != txt:
            raise FormatError(f"conflicting metadata for text {text_id}", lineno)
        if (mep_id, text_id) in votes:
            raise FormatError(f"duplicate vote for ({mep_id}, {text_id})", lineno)
        votes[(mep_id, text_id)] = value
    return VoteTable(list(meps.values()), list(texts.values()), votes)
