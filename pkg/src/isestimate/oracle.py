"""Independent-set oracles with query accounting.

Algorithms see only :class:`IndependenceOracle`. A query on a set ``S``
answers whether ``S`` spans no edge. Bulk work goes through
:meth:`IndependenceOracle.dependent_rows`, which answers one query per row of
a :class:`SetBatch` and reports the rows that do span an edge. Each row is
counted as one query, exactly as if it had been asked on its own.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .graph import Graph

_EMPTY = np.zeros(0, dtype=np.int64)
# Rows larger than this are scanned one by one instead of by pair enumeration.
_PAIR_ROW_LIMIT = 64
_PAIR_CHUNK = 1 << 22


@dataclass(frozen=True)
class SetBatch:
    """``n_rows`` vertex sets stored sparsely.

    ``rows``/``cols`` list the members in row-major order, so rows without
    entries are empty sets. ``extra`` is a vertex added to every row and
    ``excluded`` lists rows that are not part of the batch at all.
    """

    n_rows: int
    rows: np.ndarray
    cols: np.ndarray
    extra: int | None = None
    excluded: np.ndarray = field(default_factory=lambda: _EMPTY)

    @property
    def n_queries(self) -> int:
        return self.n_rows - int(self.excluded.size)

    def without(self, drop: np.ndarray, extra: int | None = None) -> "SetBatch":
        """Same sets minus the rows in ``drop``, optionally with a new extra vertex."""
        gone = np.zeros(self.n_rows, dtype=bool)
        gone[self.excluded] = True
        gone[drop] = True
        keep = ~gone[self.rows]
        return SetBatch(self.n_rows, self.rows[keep], self.cols[keep], extra, np.flatnonzero(gone))

    def row_members(self, r: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.rows, [r, r + 1])
        members = self.cols[lo:hi]
        if self.extra is not None:
            members = np.append(members, self.extra)
        return members


def from_sets(sets, extra: int | None = None) -> SetBatch:
    """Build a batch from an iterable of vertex collections."""
    rows, cols = [], []
    k = 0
    for k, s in enumerate(sets, 1):
        s = np.unique(np.asarray(s, dtype=np.int64))
        rows.append(np.full(s.size, k - 1, dtype=np.int64))
        cols.append(s)
    if not rows:
        return SetBatch(0, _EMPTY, _EMPTY, extra)
    return SetBatch(k, np.concatenate(rows), np.concatenate(cols), extra)


def segments(rows: np.ndarray):
    """Row ids, start offsets and sizes of a row-sorted entry list."""
    if rows.size == 0:
        return _EMPTY, _EMPTY, _EMPTY
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    sizes = np.diff(np.r_[starts, rows.size])
    return rows[starts], starts, sizes


def dependent_rows_of(graph: Graph, batch: SetBatch) -> np.ndarray:
    """Rows of ``batch`` whose set spans an edge of ``graph`` (ground truth)."""
    rows, cols = batch.rows, batch.cols
    hits = []
    if batch.extra is not None and cols.size:
        hits.append(rows[graph.adjacent_to(batch.extra, cols)])
    # entry i starts a pair with i+1 inside the same row
    cand = np.flatnonzero(rows[1:] == rows[:-1])
    if cand.size:
        lim = _PAIR_ROW_LIMIT
        if rows.size > lim:
            long_rows = np.unique(rows[np.flatnonzero(rows[lim:] == rows[:-lim])])
            if long_rows.size:
                for r in long_rows.tolist():
                    lo, hi = np.searchsorted(rows, [r, r + 1])
                    if graph.spans_edge(cols[lo:hi]):
                        hits.append(np.array([r]))
                cand = cand[~np.isin(rows[cand], long_rows)]
        hits.extend(_pair_scan(graph, rows, cols, cand))
    if not hits:
        return _EMPTY
    return np.unique(np.concatenate(hits))


def _pair_scan(graph, rows, cols, cand):
    # walk offsets 1, 2, ...; an entry stays a candidate while its row is long enough
    out = []
    guarded = np.append(rows, -1)
    own = rows[cand]
    o = 1
    while cand.size:
        for lo in range(0, cand.size, _PAIR_CHUNK):
            part = cand[lo : lo + _PAIR_CHUNK]
            adj = graph.has_edges(cols[part], cols[part + o])
            if adj.any():
                out.append(rows[part[adj]])
        o += 1
        keep = guarded[np.minimum(cand + o, rows.size)] == own
        cand, own = cand[keep], own[keep]
    return out


class IndependenceOracle:
    """Counting front end shared by every oracle implementation."""

    def __init__(self, n: int, record: bool = False):
        self.n = int(n)
        self.is_query_count = 0
        self.query_size_histogram: Counter = Counter()
        self.phase_counts: Counter = Counter()
        self._phases = ["unattributed"]
        self.transcript = [] if record else None

    def reset(self) -> None:
        self.is_query_count = 0
        self.query_size_histogram.clear()
        self.phase_counts.clear()
        if self.transcript is not None:
            self.transcript.clear()

    @contextmanager
    def phase(self, name: str):
        """Attribute queries issued inside the block to ``name``."""
        self._phases.append(name)
        try:
            yield
        finally:
            self._phases.pop()

    def _members(self, S) -> np.ndarray:
        members = np.unique(np.asarray(S, dtype=np.int64).ravel())
        if members.size and (members[0] < 0 or members[-1] >= self.n):
            raise InvalidInputError("vertex id outside [0, n)")
        return members

    def _tally(self, count: int, sizes: Counter) -> None:
        self.is_query_count += count
        self.phase_counts[self._phases[-1]] += count
        self.query_size_histogram.update(sizes)

    def is_independent(self, S) -> bool:
        """One query: does ``S`` span no edge?"""
        members = self._members(S)
        answer = self._answer_one(members)
        self._tally(1, {int(members.size): 1})
        if self.transcript is not None:
            self.transcript.append(("one", answer))
        return answer

    def dependent_rows(self, batch: SetBatch) -> np.ndarray:
        """Answer every row of ``batch``; return the ids of rows spanning an edge."""
        if batch.cols.size and (batch.cols.min() < 0 or batch.cols.max() >= self.n):
            raise InvalidInputError("vertex id outside [0, n)")
        if batch.extra is not None and not 0 <= batch.extra < self.n:
            raise InvalidInputError("vertex id outside [0, n)")
        if batch.n_queries <= 0:
            return _EMPTY
        dep = self._answer_many(batch)
        self._tally(batch.n_queries, _batch_sizes(batch))
        if self.transcript is not None:
            self.transcript.append(("many", batch.n_queries, dep.tobytes()))
        return dep

    def _answer_one(self, members: np.ndarray) -> bool:
        raise NotImplementedError

    def _answer_many(self, batch: SetBatch) -> np.ndarray:
        raise NotImplementedError


def _batch_sizes(batch: SetBatch) -> Counter:
    bump = 0 if batch.extra is None else 1
    per_row = np.bincount(batch.rows, minlength=batch.n_rows)
    hist = np.bincount(per_row)
    hist[0] -= batch.excluded.size
    nz = np.flatnonzero(hist)
    return Counter(dict(zip((nz + bump).tolist(), hist[nz].tolist())))


class InstrumentedOracle(IndependenceOracle):
    """Oracle backed by a concrete graph; the graph itself stays private."""

    def __init__(self, graph: Graph, record: bool = False):
        super().__init__(graph.n, record)
        self._graph = graph

    def _answer_one(self, members: np.ndarray) -> bool:
        return not self._graph.spans_edge(members)

    def _answer_many(self, batch: SetBatch) -> np.ndarray:
        return dependent_rows_of(self._graph, batch)
