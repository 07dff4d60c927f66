"""Ground-truth accessors for tests and reporting.

Nothing in the algorithm modules imports this file; estimators only ever see
an :class:`~isestimate.oracle.IndependenceOracle`.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import InvalidInputError
from .graph import Graph


def exact_edge_count(g: Graph) -> int:
    return g.m


def exact_degree(g: Graph, v: int, restrict=None) -> int:
    """Degree of ``v``, optionally counting only neighbours inside ``restrict``."""
    if not 0 <= v < g.n:
        raise InvalidInputError("vertex id outside [0, n)")
    nb = g.neighbors(v)
    if restrict is None:
        return int(nb.size)
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(list(restrict) if not isinstance(restrict, np.ndarray) else restrict, dtype=np.int64)] = True
    inside[v] = False
    return int(inside[nb].sum())


def brute_force_independent(g: Graph, S) -> bool:
    """Pair scan straight off the edge set; deliberately naive."""
    edge_set = {(int(u), int(v)) for u, v in g.edges}
    for u, v in combinations(sorted(set(int(x) for x in S)), 2):
        if (u, v) in edge_set:
            return False
    return True
