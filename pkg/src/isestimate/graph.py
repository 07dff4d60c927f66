"""Immutable simple undirected graphs over the vertex set {0, ..., n-1}."""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidInputError

# Dense boolean adjacency is kept for pair lookups up to this many vertices.
DENSE_LIMIT = 4096
# Packed bit rows are kept for short-circuit set scans up to this many vertices.
BITROW_LIMIT = 2**14


class Graph:
    """Simple undirected graph with O(1) pair membership.

    Edges are stored once as an ``(m, 2)`` array with ``u < v``. Adjacency is
    held as sorted neighbour lists (CSR); a dense boolean matrix and packed
    bit rows are built on first use when ``n`` is small enough.
    """

    def __init__(self, n: int, edges=()):
        n = int(n)
        if n < 0:
            raise InvalidInputError("vertex count must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise InvalidInputError("edge endpoint outside [0, n)")
        if np.any(e[:, 0] == e[:, 1]):
            raise InvalidInputError("self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * n + hi)
        if keys.size != e.shape[0]:
            raise InvalidInputError("parallel edges are not allowed")
        self.n = n
        self.edges = np.stack([keys // max(n, 1), keys % max(n, 1)], axis=1)
        self.edges.setflags(write=False)
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self._keys = src[order] * n + self.indices
        self._dense = None
        self._bitrows = None

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.has_edges(np.array([u]), np.array([v]))[0])

    def has_edges(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorised pair membership."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if self.n <= DENSE_LIMIT:
            return self.dense[us, vs]
        keys = us * self.n + vs
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, max(self._keys.size - 1, 0))
        if self._keys.size == 0:
            return np.zeros(keys.shape, dtype=bool)
        return self._keys[pos] == keys

    def adjacent_to(self, v: int, vs: np.ndarray) -> np.ndarray:
        """Which of ``vs`` are neighbours of the single vertex ``v``."""
        vs = np.asarray(vs, dtype=np.int64)
        if self.n <= DENSE_LIMIT:
            return self.dense[v][vs]
        nb = self.neighbors(v)
        if nb.size == 0:
            return np.zeros(vs.shape, dtype=bool)
        pos = np.minimum(np.searchsorted(nb, vs), nb.size - 1)
        return nb[pos] == vs

    @property
    def dense(self) -> np.ndarray:
        if self._dense is None:
            a = np.zeros((self.n, self.n), dtype=bool)
            a[self.edges[:, 0], self.edges[:, 1]] = True
            a[self.edges[:, 1], self.edges[:, 0]] = True
            self._dense = a
        return self._dense

    @property
    def bitrows(self) -> list[int]:
        if self._bitrows is None:
            rows = []
            for v in range(self.n):
                bits = np.zeros(self.n, dtype=bool)
                bits[self.neighbors(v)] = True
                rows.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
            self._bitrows = rows
        return self._bitrows

    def spans_edge(self, members: np.ndarray) -> bool:
        """True when some edge has both endpoints in ``members`` (distinct ids)."""
        k = members.size
        if k < 2:
            return False
        if k <= 48:
            iu, iv = np.triu_indices(k, 1)
            return bool(self.has_edges(members[iu], members[iv]).any())
        if self.n <= BITROW_LIMIT:
            rows = self.bitrows
            mask = 0
            for v in members.tolist():
                if rows[v] & mask:
                    return True
                mask |= 1 << v
            return False
        inside = np.zeros(self.n, dtype=bool)
        inside[members] = True
        starts = self.indptr[members]
        lens = self.indptr[members + 1] - starts
        total = int(lens.sum())
        if total == 0:
            return False
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
        return bool(inside[self.indices[offs]].any())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def union(*parts: Graph) -> Graph:
    """Disjoint union; vertices of later parts are shifted past earlier ones."""
    offset = 0
    chunks = []
    for g in parts:
        chunks.append(g.edges + offset)
        offset += g.n
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return Graph(offset, edges)


def load_edgelist(path: str | os.PathLike) -> Graph:
    """Read the text format: header ``n m`` then ``m`` lines ``u v`` (1-based)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidInputError(f"{path}:{lineno}: expected two integers")
            try:
                rows.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: expected two integers") from None
    if not rows:
        raise InvalidInputError(f"{path}: missing header line")
    n, m = rows[0]
    body = np.asarray(rows[1:], dtype=np.int64).reshape(-1, 2)
    if n < 0 or m != body.shape[0]:
        raise InvalidInputError(f"{path}: header declares {m} edges, found {body.shape[0]}")
    if body.size and (body.min() < 1 or body.max() > n):
        raise InvalidInputError(f"{path}: vertex id outside 1..{n}")
    return Graph(n, body - 1)


def save_edgelist(g: Graph, path: str | os.PathLike, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(f"{g.n} {g.m}\n")
        for u, v in (g.edges + 1).tolist():
            fh.write(f"{u} {v}\n")
