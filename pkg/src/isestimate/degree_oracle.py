"""Degree classification from independent-set queries alone.

Vertices are sorted into a low side ``L`` (degree at most about ``alpha**s``)
and a high side ``H``. Low vertices are further bucketed by how many low
neighbours they have. High vertices are bucketed by their degree and by
their low-neighbour count. Every answer is computed at most once per
:class:`MemoizedDegreeOracle`. Each logical sub-check draws its randomness
from a stream keyed by its own arguments, so the answers do not depend on
the order in which they are requested.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .oracle import IndependenceOracle, SetBatch
from .params import Params
from .rng import bernoulli_batch, keyed_rng
from .search import incident_neighbors

# Target number of sampled members held in memory per chunk.
_CHUNK_ENTRIES = 2_000_000
_CHUNK_ROWS = 2_000_000

_HL, _LOW, _HIGH, _FRAC = range(4)


@dataclass(frozen=True, order=True)
class BucketLabel:
    """``("low", (i,))`` for L_i or ``("high", (k, l))`` for H_{k,l}."""

    kind: str
    index: tuple

    @staticmethod
    def low(i: int) -> "BucketLabel":
        return BucketLabel("low", (i,))

    @staticmethod
    def high(k: int, l: int) -> "BucketLabel":
        return BucketLabel("high", (k, l))

    def __str__(self) -> str:
        return f"L{self.index[0]}" if self.kind == "low" else "H{},{}".format(*self.index)


def _hit_chunks(oracle, u, prob, t, rng):
    """Sample ``t`` sets T avoiding ``u`` and find those with T independent, T+{u} not.

    Yields ``(rows, cols, hits)`` per chunk, where ``hits`` are row ids.
    """
    n = oracle.n
    per_row = prob * (n - 1)
    step = int(min(_CHUNK_ROWS, max(1, _CHUNK_ENTRIES / max(per_row, 1e-12))))
    done = 0
    while done < t:
        size = min(step, t - done)
        done += size
        rows, cols = bernoulli_batch(rng, size, n, min(1.0, prob), skip=u)
        batch = SetBatch(size, rows, cols)
        dep = oracle.dependent_rows(batch)
        hits = oracle.dependent_rows(batch.without(dep, extra=u))
        yield rows, cols, hits


def check_high_degree(oracle: IndependenceOracle, u: int, d: float, params: Params, rng) -> bool:
    """True ("high") when the degree of ``u`` looks larger than ``d``.

    Counts rounds where a random set T is independent but T + {u} is not,
    with inclusion probability eps / (d log n). Meant for ``d >= alpha**s``.
    """
    eps, log_n = params.eps, params.log_n
    t = params.t_chd()
    c = 0
    for _, _, hits in _hit_chunks(oracle, u, eps / (d * log_n), t, rng):
        c += int(hits.size)
    return c > (1 + eps / 4) * t * eps / log_n


def _count_low_neighbor_hits(oracle, deg_oracle, u, prob, t, rng) -> int:
    c = 0
    for rows, cols, hits in _hit_chunks(oracle, u, prob, t, rng):
        if hits.size == 0:
            continue
        hit_mask = np.zeros(int(rows[-1]) + 1 if rows.size else 0, dtype=bool)
        hit_mask[hits] = True
        keep = hit_mask[rows]
        sub_rows = np.searchsorted(hits, rows[keep])
        nbrs = incident_neighbors(oracle, u, sub_rows, cols[keep], int(hits.size))
        for v in nbrs[nbrs >= 0].tolist():
            if not deg_oracle.high_low(v):
                c += 1
    return c


def check_low_degree(oracle, deg_oracle, u: int, d: float, params: Params, rng) -> bool:
    """True ("high") when ``u`` seems to have more than ``d`` low neighbours.

    Meant for a low vertex and ``0 < d <= alpha**s``.
    """
    eps, log_n = params.eps, params.log_n
    a_s = params.power(params.s)
    t = params.t_cld(d)
    c = _count_low_neighbor_hits(oracle, deg_oracle, u, eps / (a_s * log_n), t, rng)
    return c > (1 + eps / 4) * eps * d * t / (a_s * log_n)


def check_hl_degree(oracle, deg_oracle, u: int, k: int, l: int, params: Params, rng) -> bool:
    """True ("high") when ``u`` seems to have at least ``alpha**(k-l+1)`` low neighbours.

    Guarantees assume ``alpha**(k-1) <= deg(u) <= alpha**(k+1)``.
    """
    eps, log_n = params.eps, params.log_n
    t = params.t_chl()
    c = _count_low_neighbor_hits(oracle, deg_oracle, u, eps / (params.power(k) * log_n), t, rng)
    return c > (1 + eps / 4) * eps * t / (params.power(l) * log_n)


class MemoizedDegreeOracle:
    """Consistent bucket-membership answers for one advice value.

    ``abstract_cost`` charges 1 per fresh high-side membership answer and
    ``alpha**(s-i)`` per fresh low-side answer for bucket ``i``;
    ``is_queries`` counts the independent-set queries spent here.
    """

    def __init__(self, oracle: IndependenceOracle, params: Params, seed: int):
        self.oracle = oracle
        self.params = params
        self.seed = int(seed)
        self.abstract_cost = 0.0
        self.is_queries = 0
        self._depth = 0
        self._start = 0
        self._hl: dict[int, bool] = {}
        self._low: dict[tuple, bool] = {}
        self._high: dict[tuple, bool] = {}
        self._frac: dict[tuple, bool] = {}
        self._d_low: dict[tuple, int] = {}
        self._d_high: dict[tuple, int] = {}

    @contextmanager
    def _metered(self):
        if self._depth == 0:
            self._start = self.oracle.is_query_count
        self._depth += 1
        try:
            with self.oracle.phase("degree_oracle"):
                yield
        finally:
            self._depth -= 1
            if self._depth == 0:
                self.is_queries += self.oracle.is_query_count - self._start

    def stats(self) -> dict:
        return {
            "high_low": len(self._hl),
            "low_checks": len(self._low),
            "high_checks": len(self._high),
            "fraction_checks": len(self._frac),
            "d_low_answers": len(self._d_low),
            "d_high_answers": len(self._d_high),
            "abstract_cost": self.abstract_cost,
            "is_queries": self.is_queries,
        }

    def high_low(self, u: int) -> bool:
        """True when ``u`` is placed on the high side."""
        u = int(u)
        if u not in self._hl:
            with self._metered():
                rng = keyed_rng(self.seed, _HL, u)
                self._hl[u] = check_high_degree(self.oracle, u, self.params.power(self.params.s), self.params, rng)
        return self._hl[u]

    def low_answer(self, u: int, j: int) -> bool:
        """Low-neighbour check at threshold ``alpha**j``; ``j = s`` is fixed to low."""
        if j >= self.params.s:
            return False
        key = (int(u), j)
        if key not in self._low:
            with self._metered():
                rng = keyed_rng(self.seed, _LOW, key[0], j + 1)
                self._low[key] = check_low_degree(self.oracle, self, key[0], self.params.power(j), self.params, rng)
        return self._low[key]

    def high_answer(self, u: int, k: int) -> bool:
        """Degree check at ``alpha**k``; fixed to high at ``k = s`` and low at ``k = beta``."""
        if k <= self.params.s:
            return True
        if k >= self.params.beta:
            return False
        key = (int(u), k)
        if key not in self._high:
            with self._metered():
                rng = keyed_rng(self.seed, _HIGH, key[0], k)
                self._high[key] = check_high_degree(self.oracle, key[0], self.params.power(k), self.params, rng)
        return self._high[key]

    def fraction_answer(self, u: int, k: int, l: int) -> bool:
        """Low-neighbour check of a high vertex; fixed to low at ``l = 0``."""
        if l <= 0:
            return False
        key = (int(u), k, l)
        if key not in self._frac:
            with self._metered():
                rng = keyed_rng(self.seed, _FRAC, key[0], k, l)
                self._frac[key] = check_hl_degree(self.oracle, self, key[0], k, l, self.params, rng)
        return self._frac[key]

    def d_low(self, u: int, i: int) -> int:
        """1 when ``u`` belongs to low bucket ``i``."""
        key = (int(u), int(i))
        if key not in self._d_low:
            self._d_low[key] = self._eval_low(*key)
            self.abstract_cost += self.params.power(self.params.s - i)
        return self._d_low[key]

    def d_high(self, u: int, k: int, l: int) -> int:
        """1 when ``u`` belongs to high bucket ``(k, l)``."""
        key = (int(u), int(k), int(l))
        if key not in self._d_high:
            self._d_high[key] = self._eval_high(*key)
            self.abstract_cost += 1.0
        return self._d_high[key]

    def _eval_low(self, u, i):
        if self.high_low(u):
            return 0
        if i == 0:
            return int(not self.low_answer(u, -1))
        below = -1 if i == 1 else i - 1
        # the cheaper check (larger threshold) first; both are memoised
        if self.low_answer(u, i):
            return 0
        return int(self.low_answer(u, below))

    def _eval_high(self, u, k, l):
        if not self.high_low(u):
            return 0
        if self.high_answer(u, k) or not self.high_answer(u, k - 1):
            return 0
        if l == self.params.tau:
            return int(not self.fraction_answer(u, k, l))
        if not self.fraction_answer(u, k, l + 1):
            return 0
        return int(not self.fraction_answer(u, k, l))

    def assigned_buckets(self, u: int) -> list[BucketLabel]:
        """Every bucket whose membership answer for ``u`` is 1."""
        p = self.params
        out = [BucketLabel.low(i) for i in range(p.s + 1) if self.d_low(u, i)]
        for k in range(p.s + 1, p.beta + 1):
            out.extend(BucketLabel.high(k, l) for l in range(p.tau + 1) if self.d_high(u, k, l))
        return out


def high_low(deg_oracle: MemoizedDegreeOracle, u: int) -> bool:
    return deg_oracle.high_low(u)


def sim_d_low(deg_oracle: MemoizedDegreeOracle, u: int, i: int) -> int:
    return deg_oracle.d_low(u, i)


def sim_d_high(deg_oracle: MemoizedDegreeOracle, u: int, k: int, l: int) -> int:
    return deg_oracle.d_high(u, k, l)
