"""Augmented oracle over planted instances and distinguishing experiments.

The augmented oracle is stronger than an independent-set oracle: each query
reveals the side labels of queried vertices and the edges among everything
revealed so far. Any independent-set algorithm can be replayed against it
with at most one augmented query per IS query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.stats.proportion import confint_proportions_2indep

from .errors import BudgetExceededError, InvalidInputError
from .generators import PlantedInstance, gen_coupled
from .oracle import IndependenceOracle, SetBatch, dependent_rows_of


class KnowledgeTriple:
    """Known vertices, their labels and the edges among them.

    Labels and edges are read from the instance on access, so revealing the
    whole graph after a failed query costs nothing up front.
    """

    def __init__(self, instance: PlantedInstance):
        self._inst = instance
        self.known = np.zeros(instance.n, dtype=bool)

    @property
    def K(self) -> np.ndarray:
        return np.flatnonzero(self.known)

    def __len__(self) -> int:
        return int(self.known.sum())

    def reveal(self, vertices) -> None:
        self.known[np.asarray(vertices, dtype=np.int64)] = True

    def reveal_all(self) -> None:
        self.known[:] = True

    def label(self, v: int) -> str:
        if not self.known[v]:
            raise InvalidInputError(f"vertex {v} is not known")
        return self._inst.label(v)

    def labels(self) -> dict:
        return {int(v): self._inst.label(int(v)) for v in self.K}

    def edge(self, i: int, j: int) -> bool:
        if not (self.known[i] and self.known[j]):
            raise InvalidInputError("both endpoints must be known")
        return i != j and bool(self._inst.has_edges([i], [j])[0])

    def spans_edge(self, members) -> bool:
        members = np.asarray(members, dtype=np.int64)
        if not self.known[members].all():
            raise InvalidInputError("set contains unknown vertices")
        return self._inst.spans_edge(members)

    def heavy_seen(self) -> bool:
        return bool((self.known & self._inst.in_b).any())

    def known_edge_count(self) -> int:
        """Edges with both endpoints known; the full count once everything is known."""
        if self.known.all():
            return self._inst.edge_count
        g = self._inst.graph
        return int((self.known[g.edges[:, 0]] & self.known[g.edges[:, 1]]).sum())


class AugmentedOracle:
    """Reveal-on-query oracle with sample size ``t = ceil(sqrt(n/d) log2 n)``."""

    def __init__(self, instance: PlantedInstance, rng):
        self.instance = instance
        n, d = instance.n, instance.d
        self.t = math.ceil(math.sqrt(n / d) * math.log2(n)) if d > 0 else n
        self.triple = KnowledgeTriple(instance)
        self.failed = False
        self.queries = 0
        self._rng = rng

    def query(self, Q) -> KnowledgeTriple:
        Q = np.unique(np.asarray(Q, dtype=np.int64))
        if Q.size and (Q[0] < 0 or Q[-1] >= self.instance.n):
            raise InvalidInputError("vertex id outside [0, n)")
        if self.triple.known[Q].any():
            raise InvalidInputError("query overlaps known vertices")
        self.queries += 1
        if Q.size <= self.t:
            self.triple.reveal(Q)
            return self.triple
        L = np.sort(self._rng.choice(Q, size=self.t, replace=False))
        if self.instance.spans_edge(L):
            self.triple.reveal(L)
        else:
            self.failed = True
            self.triple.reveal_all()
        return self.triple


def aug_query(oracle: AugmentedOracle, Q) -> KnowledgeTriple:
    return oracle.query(Q)


class AugmentedSimulationOracle(IndependenceOracle):
    """Answers IS queries using only an :class:`AugmentedOracle`.

    For a query S the unknown part ``S - K`` is sent to the augmented oracle.
    Small unknown parts become known and S is answered from the known edges.
    A large unknown part either exposes an edge inside S or, on failure,
    reveals the whole graph.
    """

    def __init__(self, aug: AugmentedOracle, record: bool = False):
        super().__init__(aug.instance.n, record)
        self.aug = aug

    def _answer_one(self, members: np.ndarray) -> bool:
        triple = self.aug.triple
        unknown = members[~triple.known[members]]
        if unknown.size:
            big = unknown.size > self.aug.t
            self.aug.query(unknown)
            if big and not self.aug.failed:
                return False
        return not triple.spans_edge(members)

    def _answer_many(self, batch: SetBatch) -> np.ndarray:
        known = self.aug.triple.known
        graph = self.aug.instance.graph
        rows, cols = batch.rows, batch.cols
        excluded = np.zeros(batch.n_rows, dtype=bool)
        excluded[batch.excluded] = True
        dep = []
        pos = 0
        while pos < batch.n_rows:
            lo = np.searchsorted(rows, pos)
            tail_rows, tail_cols = rows[lo:], cols[lo:]
            stuck = tail_rows[~known[tail_cols] & ~excluded[tail_rows]]
            nxt = int(stuck[0]) if stuck.size else batch.n_rows
            if batch.extra is not None and not known[batch.extra]:
                free = np.flatnonzero(~excluded[pos:])
                nxt = min(nxt, pos + int(free[0])) if free.size else nxt
            if nxt > pos:
                hi = np.searchsorted(rows, nxt)
                sub = SetBatch(
                    nxt - pos,
                    rows[lo:hi] - pos,
                    cols[lo:hi],
                    batch.extra,
                    np.flatnonzero(excluded[pos:nxt]),
                )
                if sub.n_queries:
                    dep.append(dependent_rows_of(graph, sub) + pos)
            if nxt < batch.n_rows:
                hi = np.searchsorted(rows, nxt + 1)
                members = cols[np.searchsorted(rows, nxt) : hi]
                if batch.extra is not None:
                    members = np.unique(np.append(members, batch.extra))
                if not self._answer_one(members):
                    dep.append(np.array([nxt]))
            pos = nxt + 1
        if not dep:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(dep).astype(np.int64)


@dataclass
class SimulationResult:
    value: object
    transcript: list
    aug_queries: int
    is_queries: int
    failed: bool


def simulate_is_via_augmented(wrapped_algorithm, instance: PlantedInstance, rng) -> SimulationResult:
    """Run ``wrapped_algorithm(oracle)`` with IS answers produced by an augmented oracle."""
    aug = AugmentedOracle(instance, rng)
    sim = AugmentedSimulationOracle(aug, record=True)
    value = wrapped_algorithm(sim)
    return SimulationResult(value, sim.transcript, aug.queries, sim.is_query_count, aug.failed)


# Distinguishing strategies. A strategy is called with the current knowledge
# and a StrategyContext. It returns a vertex set to query next, or a verdict
# "yes" (light) / "no" (heavy).


@dataclass
class StrategyContext:
    n: int
    m: float
    t: int
    budget: int
    queries_made: int
    instance: PlantedInstance | None = None


def always_yes(triple, ctx):
    return "yes"


def singleton_scan(triple, ctx):
    """Query unknown vertices one at a time, in id order; "no" once a heavy vertex shows."""
    if triple.heavy_seen():
        return "no"
    if ctx.queries_made >= ctx.budget:
        return "yes"
    unknown = np.flatnonzero(~triple.known)
    return "yes" if unknown.size == 0 else unknown[:1]


def threshold_sets(triple, ctx):
    """Query blocks of ``2t`` unknown vertices; decide by heavy labels or the full edge count."""
    if triple.known.all():
        return "no" if triple.known_edge_count() >= 0.75 * ctx.m else "yes"
    if triple.heavy_seen():
        return "no"
    if ctx.queries_made >= ctx.budget:
        return "yes"
    unknown = np.flatnonzero(~triple.known)
    return unknown[: 2 * ctx.t]


def ground_truth(triple, ctx):
    """Exact edge count straight from the instance; ignores the oracle and its budget."""
    return "no" if ctx.instance.edge_count >= 0.75 * ctx.m else "yes"


ground_truth.bypass_oracle = True

STRATEGIES = {
    "always-yes": always_yes,
    "singleton-scan": singleton_scan,
    "threshold-sets": threshold_sets,
    "ground-truth": ground_truth,
}


def query_budget(n: int, m: float) -> int:
    """``ceil(sqrt(n/d) / log2(n)**3)`` with ``d = m/n``."""
    d = m / n
    return math.ceil(math.sqrt(n / d) / math.log2(n) ** 3)


def run_strategy(strategy, instance: PlantedInstance, rng, budget: int) -> str:
    aug = AugmentedOracle(instance, rng)
    bypass = getattr(strategy, "bypass_oracle", False)
    while True:
        ctx = StrategyContext(instance.n, instance.target_m, aug.t, budget, aug.queries, instance if bypass else None)
        out = strategy(aug.triple, ctx)
        if isinstance(out, str):
            if out not in ("yes", "no"):
                raise InvalidInputError(f"unknown verdict {out!r}")
            return out
        if aug.queries >= budget:
            raise BudgetExceededError(f"strategy exceeded {budget} queries")
        aug.query(out)


@dataclass
class ExperimentResult:
    strategy: str
    advantage: float
    ci_low: float
    ci_high: float
    no_rate_heavy: float
    no_rate_light: float
    trials: int
    budget: int


def distinguishing_experiment(strategy, n: int, m: float, trials: int, rng) -> ExperimentResult:
    """Estimate Pr[no | heavy] - Pr[no | light] over coupled instance pairs.

    Each trial draws a light and a heavy instance from one seed and runs the
    strategy on both with identically seeded augmented oracles. The interval
    is Newcombe's hybrid score interval, which combines two Wilson intervals.
    """
    if isinstance(strategy, str):
        name, fn = strategy, STRATEGIES[strategy]
    else:
        name, fn = getattr(strategy, "__name__", "custom"), strategy
    budget = query_budget(n, m)
    no_heavy = no_light = 0
    for _ in range(trials):
        seed = int(rng.integers(0, 2**63 - 1))
        light, heavy = gen_coupled(n, m, seed)
        no_light += run_strategy(fn, light, np.random.default_rng(seed + 1), budget) == "no"
        no_heavy += run_strategy(fn, heavy, np.random.default_rng(seed + 1), budget) == "no"
    if trials == 0:
        return ExperimentResult(name, 0.0, 0.0, 0.0, 0.0, 0.0, 0, budget)
    lo, hi = confint_proportions_2indep(no_heavy, trials, no_light, trials, method="newcomb", compare="diff")
    return ExperimentResult(
        name,
        (no_heavy - no_light) / trials,
        float(lo),
        float(hi),
        no_heavy / trials,
        no_light / trials,
        trials,
        budget,
    )
