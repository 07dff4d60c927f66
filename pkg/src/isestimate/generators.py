"""Graph families for tests, benchmarks and the hardness experiments."""

from __future__ import annotations

import math
import warnings
from functools import cached_property

import numpy as np

from .errors import InvalidInputError
from .graph import Graph, union
from .rng import bernoulli_batch, draw_seed, sample_bernoulli_subset, substream


def gen_erdos_renyi(n: int, p: float, rng) -> Graph:
    """G(n, p): each of the ``n choose 2`` pairs independently with probability ``p``."""
    if n < 0:
        raise InvalidInputError("n must be non-negative")
    rows, cols = bernoulli_batch(rng, n, n, p)
    keep = rows < cols
    return Graph(n, np.stack([rows[keep], cols[keep]], axis=1))


def gen_star(n: int) -> Graph:
    """Vertex 0 joined to vertices 1..n-1."""
    if n < 1:
        raise InvalidInputError("a star needs at least one vertex")
    leaves = np.arange(1, n)
    return Graph(n, np.stack([np.zeros_like(leaves), leaves], axis=1))


def gen_complete_bipartite(a: int, b: int) -> Graph:
    """Sides ``0..a-1`` and ``a..a+b-1`` with all cross pairs."""
    if a < 0 or b < 0:
        raise InvalidInputError("side sizes must be non-negative")
    left, right = np.meshgrid(np.arange(a), np.arange(a, a + b), indexing="ij")
    return Graph(a + b, np.stack([left.ravel(), right.ravel()], axis=1))


def gen_matching(n: int) -> Graph:
    """Perfect matching ``(0,1), (2,3), ...`` (the last vertex is isolated when n is odd)."""
    if n < 0:
        raise InvalidInputError("n must be non-negative")
    left = np.arange(0, n - 1, 2)
    return Graph(n, np.stack([left, left + 1], axis=1))


def gen_empty(n: int) -> Graph:
    return Graph(n)


def gen_union(*parts: Graph) -> Graph:
    return union(*parts)


class PlantedInstance:
    """Bipartite instance between a random side ``A`` and its complement.

    Pairs in ``A x Abar`` are present independently with probability ``d/n``.
    In the heavy variant every vertex of ``B`` (a sparse random subset of
    ``A``) is joined to all of ``Abar``. The Bernoulli pairs are drawn once
    and shared, so the heavy graph is the light graph plus ``B x Abar``.
    """

    def __init__(self, n, target_m, a_mask, b_mask, stream, regime_ok=True):
        self.n = int(n)
        self.target_m = target_m
        self.d = target_m / n
        self.in_a = a_mask
        self.in_b = b_mask
        self.A = np.flatnonzero(a_mask)
        self.B = np.flatnonzero(b_mask)
        self.Abar = np.flatnonzero(~a_mask)
        # Bernoulli pairs (i in A, j in Abar), dropping rows that B makes complete
        keep = ~b_mask[stream[:, 0]]
        self._stream = stream[keep]
        self._stream_keys = np.sort(self._stream[:, 0] * n + self._stream[:, 1])
        self.regime_ok = regime_ok

    @property
    def is_heavy(self) -> bool:
        return bool(self.B.size)

    @property
    def edge_count(self) -> int:
        return int(self._stream.shape[0] + self.B.size * self.Abar.size)

    def label(self, v: int) -> str:
        if not self.in_a[v]:
            return "abar"
        return "b" if self.in_b[v] else "a"

    def heavy_edges(self) -> np.ndarray:
        bb, jj = np.meshgrid(self.B, self.Abar, indexing="ij")
        return np.stack([bb.ravel(), jj.ravel()], axis=1)

    @cached_property
    def graph(self) -> Graph:
        return Graph(self.n, np.concatenate([self._stream, self.heavy_edges()]))

    def has_edges(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        a_side = np.where(self.in_a[us], us, vs)
        other = np.where(self.in_a[us], vs, us)
        crossing = self.in_a[us] != self.in_a[vs]
        keys = a_side * self.n + other
        pos = np.searchsorted(self._stream_keys, keys)
        found = np.zeros(keys.shape, dtype=bool)
        if self._stream_keys.size:
            pos = np.minimum(pos, self._stream_keys.size - 1)
            found = self._stream_keys[pos] == keys
        return crossing & (found | self.in_b[a_side])

    def spans_edge(self, members) -> bool:
        """Edge test inside ``members`` without building the full graph."""
        members = np.unique(np.asarray(members, dtype=np.int64))
        left = members[self.in_a[members]]
        right = members[~self.in_a[members]]
        if left.size == 0 or right.size == 0:
            return False
        if self.in_b[left].any():
            return True
        inside = np.zeros(self.n, dtype=bool)
        inside[right] = True
        ptr, nbrs = self._light_adjacency
        starts, ends = ptr[left], ptr[left + 1]
        lens = ends - starts
        total = int(lens.sum())
        if total == 0:
            return False
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
        return bool(inside[nbrs[offs]].any())

    @cached_property
    def _light_adjacency(self):
        # Bernoulli neighbours of each A vertex, as CSR over all n ids
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self._stream[:, 0], minlength=self.n), out=ptr[1:])
        return ptr, self._stream_keys % self.n

    def sidecar(self) -> dict:
        return {"A": int(self.A.size), "B": int(self.B.size), "edges": self.edge_count, "d": self.d}


def in_regime(n: int, m: float) -> bool:
    """Whether ``n <= m <= n**2 / log2(n)**6``."""
    return n <= m <= n**2 / math.log2(n) ** 6


def _planted(n: int, m: float, rng, heavy: bool) -> PlantedInstance:
    if n < 2:
        raise InvalidInputError("need n >= 2")
    if m < 0:
        raise InvalidInputError("m must be non-negative")
    d = m / n
    regime_ok = in_regime(n, m)
    if not regime_ok:
        warnings.warn(f"(n={n}, m={m}) lies outside n <= m <= n^2/log^6 n", stacklevel=3)
    b_prob = d * math.log2(n) / n
    if heavy and b_prob > 1:
        raise InvalidInputError("d log n / n exceeds 1")
    seed = draw_seed(rng)
    a_mask = substream(seed, "side").random(n) < 0.5
    A = np.flatnonzero(a_mask)
    Abar = np.flatnonzero(~a_mask)
    b_mask = np.zeros(n, dtype=bool)
    heavy_members = sample_bernoulli_subset(A, b_prob if b_prob <= 1 else 1.0, substream(seed, "heavy"))
    if heavy:
        b_mask[heavy_members] = True
    rows, cols = bernoulli_batch(substream(seed, "pairs"), A.size, Abar.size, min(1.0, d / n))
    stream = np.stack([A[rows], Abar[cols]], axis=1) if rows.size else np.zeros((0, 2), dtype=np.int64)
    return PlantedInstance(n, m, a_mask, b_mask, stream, regime_ok)


def gen_dyes(n: int, m: float, rng) -> PlantedInstance:
    """Light planted instance: about m/4 edges in expectation, no heavy set."""
    return _planted(n, m, rng, heavy=False)


def gen_dno(n: int, m: float, rng) -> PlantedInstance:
    """Heavy planted instance: the light one plus a complete ``B x Abar``."""
    return _planted(n, m, rng, heavy=True)


def gen_coupled(n: int, m: float, seed: int) -> tuple[PlantedInstance, PlantedInstance]:
    """Light and heavy instances built from the same seed."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_dyes(n, m, np.random.default_rng(seed)), gen_dno(n, m, np.random.default_rng(seed))
