"""Recovering an edge from a vertex set that is known to span one."""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractViolationError, InvalidInputError
from .oracle import IndependenceOracle, SetBatch

_EMPTY = np.zeros(0, dtype=np.int64)


def binary_search_rounds(n: int, delta: float, c_bs: float = 4.0) -> int:
    """Iteration count ``ceil(c_bs * (log2 n + log2(1/delta)))``."""
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must lie in (0, 1)")
    return max(1, math.ceil(c_bs * (math.log2(max(n, 2)) + math.log2(1.0 / delta))))


def random_binary_search(
    oracle: IndependenceOracle,
    T,
    delta: float,
    rng: np.random.Generator,
    c_bs: float = 4.0,
):
    """Randomised halving towards an edge inside ``T``.

    Each round splits the current set uniformly at random into two halves
    whose sizes differ by at most one and moves into a half that spans an
    edge. The second half is only queried when the first one is independent.
    Returns ``(u, v)`` with ``u < v`` or ``None`` on failure; at most
    ``2 * rounds + 1`` queries are made.
    """
    current = np.unique(np.asarray(T, dtype=np.int64))
    if current.size < 2:
        raise InvalidInputError("need at least two vertices")
    rounds = binary_search_rounds(oracle.n, delta, c_bs)
    confirmed = False
    for _ in range(rounds):
        if current.size == 2:
            # the input pair has not been looked at yet; one query settles it
            if not confirmed and oracle.is_independent(current):
                return None
            return int(current[0]), int(current[1])
        perm = rng.permutation(current)
        half = current.size // 2
        first, second = perm[:half], perm[half:]
        if not oracle.is_independent(first):
            current, confirmed = np.sort(first), True
        elif not oracle.is_independent(second):
            current, confirmed = np.sort(second), True
    return None


def find_incident_edge(oracle: IndependenceOracle, u: int, T) -> tuple[int, int]:
    """Deterministic halving for a neighbour of ``u`` inside ``T``.

    Requires ``T`` independent and ``T + {u}`` not. The lower-id half is
    probed first. A one-element ``T`` is confirmed with a single query.
    """
    members = np.unique(np.asarray(T, dtype=np.int64))
    members = members[members != u]
    if members.size == 0:
        raise InvalidInputError("T must contain a vertex other than u")
    if members.size == 1:
        if oracle.is_independent([u, int(members[0])]):
            raise ContractViolationError(f"vertex {u} has no neighbour in T")
        return int(u), int(members[0])
    v = incident_neighbors(oracle, u, np.zeros(members.size, dtype=np.int64), members, 1)[0]
    if v < 0:
        raise ContractViolationError(f"vertex {u} has no neighbour in T")
    return int(u), int(v)


def incident_neighbors(
    oracle: IndependenceOracle,
    u: int,
    rows: np.ndarray,
    cols: np.ndarray,
    n_rows: int,
) -> np.ndarray:
    """Run the deterministic halving on many sets at once.

    ``rows``/``cols`` describe ``n_rows`` sorted, non-empty sets that each
    satisfy the precondition of :func:`find_incident_edge`. All sets advance
    one level per step, so the queries asked per set are exactly those of
    the one-at-a-time procedure. Returns one neighbour per set, or ``-1``
    where both halves turned out independent.
    """
    starts = np.searchsorted(rows, np.arange(n_rows))
    ends = np.searchsorted(rows, np.arange(n_rows), side="right")
    lo, hi = starts.copy(), ends.copy()
    broken = np.zeros(n_rows, dtype=bool)
    active = np.flatnonzero(hi - lo > 1)
    while active.size:
        mid = lo[active] + (hi[active] - lo[active] + 1) // 2
        dep = _probe(oracle, u, cols, lo[active], mid)
        go_low = np.zeros(active.size, dtype=bool)
        go_low[dep] = True
        hi[active[go_low]] = mid[go_low]
        rest = np.flatnonzero(~go_low)
        if rest.size:
            dep2 = _probe(oracle, u, cols, mid[rest], hi[active[rest]])
            go_high = np.zeros(rest.size, dtype=bool)
            go_high[dep2] = True
            lo[active[rest[go_high]]] = mid[rest[go_high]]
            broken[active[rest[~go_high]]] = True
        active = active[(hi[active] - lo[active] > 1) & ~broken[active]]
    out = np.where(broken | (hi - lo != 1), -1, cols[np.minimum(lo, max(cols.size - 1, 0))])
    return out.astype(np.int64)


def _probe(oracle, u, cols, a, b):
    """Query ``cols[a_j:b_j] + {u}`` for every j; return the j that span an edge."""
    lens = b - a
    total = int(lens.sum())
    offs = np.repeat(a - np.cumsum(lens) + lens, lens) + np.arange(total)
    batch = SetBatch(int(a.size), np.repeat(np.arange(a.size), lens), cols[offs], extra=int(u))
    return oracle.dependent_rows(batch)
