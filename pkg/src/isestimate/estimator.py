"""Edge-count estimation from independent-set queries.

``estimate_with_advice`` estimates the bucket sizes of a degree
classification built for an advice value ``m_bar``. From those sizes it
reconstructs the edge count. ``estimate_edges`` halves the advice from
``n choose 2`` until the estimate is consistent with it.
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .degree_oracle import MemoizedDegreeOracle
from .errors import InvalidInputError
from .oracle import IndependenceOracle, SetBatch
from .params import Params, Tunables
from .rng import bernoulli_batch, draw_seed
from .search import binary_search_rounds, random_binary_search

SCHEMA_VERSION = 1
_CHUNK_ROWS = 1_000_000


@dataclass
class BucketEstimates:
    """``kappa[i]`` for low buckets; ``gamma[k - s - 1, l]`` for high buckets."""

    kappa: np.ndarray
    gamma: np.ndarray
    s: int

    def gamma_at(self, k: int, l: int) -> float:
        return float(self.gamma[k - self.s - 1, l])


def estimate_Li(oracle: IndependenceOracle, deg_oracle: MemoizedDegreeOracle, params: Params, rng) -> np.ndarray:
    """Estimate ``|L_i|`` for every low bucket ``i`` in ``0..s``.

    Draws vertices uniformly with replacement and tests membership. Only the
    multiplicity of each vertex matters, so the draw is made as a single
    multinomial over ``[n]``.
    """
    n = params.n
    kappa = np.zeros(params.s + 1)
    with oracle.phase("low_buckets"):
        for i in range(params.s + 1):
            if params.li_trivial(i):
                continue
            draws = params.li_samples(i)
            counts = rng.multinomial(draws, np.full(n, 1.0 / n))
            hit = sum(int(counts[u]) for u in np.flatnonzero(counts).tolist() if deg_oracle.d_low(u, i))
            kappa[i] = max(0.0, (hit / draws - params.li_shift(i)) * n)
    return kappa


def _row_union(rows_a, cols_a, rows_b, cols_b):
    rows = np.concatenate([rows_a, rows_b])
    cols = np.concatenate([cols_a, cols_b])
    if rows.size == 0:
        return rows, cols
    keys = np.unique(rows * (int(cols.max()) + 1) + cols)
    width = int(cols.max()) + 1
    return keys // width, keys % width


def _event_counts(oracle, deg_oracle, pairs, eta, params: Params, rng) -> np.ndarray:
    """Run the event loop for every ``(k, l)`` in ``pairs`` at one eta.

    Rounds of all pairs are laid out pair-major and answered in shared
    batches; each round is still its own pair of queries. Returns the event
    count of each pair.
    """
    n = params.n
    rounds = params.hde_rounds()
    p = min(1.0, params.hde_p(eta))
    delta = params.hde_delta()
    ks = np.array([k for k, _ in pairs], dtype=np.int64)
    counts = np.zeros(len(pairs), dtype=np.int64)
    total = len(pairs) * rounds
    a = 0
    while a < total:
        b = min(total, a + _CHUNK_ROWS)
        size = b - a
        s_rows, s_cols = bernoulli_batch(rng, size, n, p)
        t_parts = []
        r = a
        while r < b:
            k = ks[r // rounds]
            # rows of consecutive pairs that share k use the same inclusion probability
            same = np.flatnonzero(ks[r // rounds :] != k)
            stop = b if same.size == 0 else min(b, (r // rounds + int(same[0])) * rounds)
            rr, cc = bernoulli_batch(rng, stop - r, n, min(1.0, params.hde_q(int(k))))
            t_parts.append((rr + (r - a), cc))
            r = stop
        t_rows = np.concatenate([x for x, _ in t_parts])
        t_cols = np.concatenate([y for _, y in t_parts])
        t_dep = oracle.dependent_rows(SetBatch(size, t_rows, t_cols))
        u_rows, u_cols = _row_union(s_rows, s_cols, t_rows, t_cols)
        hits = oracle.dependent_rows(SetBatch(size, u_rows, u_cols).without(t_dep))
        for r in hits.tolist():
            idx = (a + r) // rounds
            k, l = pairs[idx]
            s_members = s_cols[np.searchsorted(s_rows, r) : np.searchsorted(s_rows, r, side="right")]
            t_members = t_cols[np.searchsorted(t_rows, r) : np.searchsorted(t_rows, r, side="right")]
            both = u_cols[np.searchsorted(u_rows, r) : np.searchsorted(u_rows, r, side="right")]
            edge = random_binary_search(oracle, both, delta, rng, params.tunables.c_bs)
            if edge is None:
                continue
            member = [deg_oracle.d_high(x, k, l) for x in edge]
            for x, inside in zip(edge, member):
                if inside and x in s_members and not oracle.is_independent(np.append(t_members, x)):
                    counts[idx] += 1
                    break
        a = b
    return counts


def high_degree_event(
    oracle: IndependenceOracle,
    deg_oracle: MemoizedDegreeOracle,
    k: int,
    l: int,
    eta: float,
    params: Params,
    rng,
) -> bool:
    """True ("many") when bucket ``(k, l)`` looks larger than about ``eta * n``.

    Each round samples a sparse set S and a denser set T. When T is
    independent but S + T is not, an edge of S + T is located. The round
    counts if that edge has an endpoint in S that belongs to the bucket and
    is adjacent to T.
    """
    lo = params.eta_min(k)
    if not (lo * (1 - 1e-12) <= eta <= 1.0):
        raise InvalidInputError(f"eta={eta} outside [{lo}, 1]")
    c = _event_counts(oracle, deg_oracle, [(k, l)], eta, params, rng)[0]
    return bool(c >= params.hde_threshold(eta))


@dataclass
class ScanResult:
    gamma: np.ndarray
    calls: np.ndarray


def high_degree_scan(oracle, deg_oracle, pairs, params: Params, rng) -> ScanResult:
    """Scan eta = 1, 1/alpha, 1/alpha**2, ... for several buckets in lockstep.

    A bucket drops out on its first "many" (estimate ``eta * n``) or once
    eta falls below its lower limit (estimate 0).
    """
    gamma = np.zeros(len(pairs))
    calls = np.zeros(len(pairs), dtype=np.int64)
    limits = np.array([params.eta_min(k) for k, _ in pairs])
    active = np.arange(len(pairs))
    j = 0
    while active.size:
        eta = params.alpha**-j
        active = active[eta >= limits[active]]
        if active.size == 0:
            break
        counts = _event_counts(oracle, deg_oracle, [pairs[i] for i in active], eta, params, rng)
        calls[active] += 1
        many = counts >= params.hde_threshold(eta)
        gamma[active[many]] = eta * params.n
        active = active[~many]
        j += 1
    return ScanResult(gamma, calls)


def high_degree_bucket(
    oracle: IndependenceOracle,
    deg_oracle: MemoizedDegreeOracle,
    k: int,
    l: int,
    params: Params,
    rng,
) -> float:
    """Estimate ``|H_{k,l}|`` by scanning eta = 1, 1/alpha, ... downwards."""
    return float(high_degree_scan(oracle, deg_oracle, [(k, l)], params, rng).gamma[0])


def combine_buckets(kappa: np.ndarray, gamma: np.ndarray, params: Params) -> float:
    """Edge count implied by bucket sizes: half the sum of estimated degrees."""
    s, tau = params.s, params.tau
    m1 = sum(kappa[i] * params.power(i) for i in range(1, s + 1))
    m2 = 0.0
    m3 = 0.0
    for row, k in enumerate(range(s + 1, params.beta + 1)):
        m2 += gamma[row].sum() * params.power(k)
        m3 += sum(gamma[row, l] * params.power(k - l) for l in range(tau))
    return (m1 + m2 + m3) / 2


@dataclass
class AdviceResult:
    m_hat: float
    buckets: BucketEstimates
    params: Params
    is_queries: int
    abstract_cost: float
    memo: dict


def estimate_with_advice(
    eps: float,
    n: int,
    m_bar: float,
    oracle: IndependenceOracle,
    rng,
    tunables: Tunables | None = None,
) -> AdviceResult:
    """Estimate the edge count assuming it is at most ``m_bar``."""
    params = Params(eps, n, m_bar, tunables or Tunables())
    start = oracle.is_query_count
    deg_oracle = MemoizedDegreeOracle(oracle, params, draw_seed(rng))
    kappa = estimate_Li(oracle, deg_oracle, params, rng)
    ks = range(params.s + 1, params.beta + 1)
    pairs = [(k, l) for k in ks for l in range(params.tau + 1)]
    with oracle.phase("high_buckets"):
        scan = high_degree_scan(oracle, deg_oracle, pairs, params, rng)
    gamma = scan.gamma.reshape(len(ks), params.tau + 1)
    m_hat = combine_buckets(kappa, gamma, params)
    return AdviceResult(
        m_hat=m_hat,
        buckets=BucketEstimates(kappa, gamma, params.s),
        params=params,
        is_queries=oracle.is_query_count - start,
        abstract_cost=deg_oracle.abstract_cost,
        memo=deg_oracle.stats(),
    )


def advice_budget(params: Params) -> dict:
    """Worst-case query count and abstract cost of one advice run.

    Built only from the configured loop counts. Fresh degree-oracle work is
    charged at most once per distinct vertex and sub-check; repeats are free.
    """
    n, s, beta, tau = params.n, params.s, params.beta, params.tau
    probe = 2 + 2 * math.ceil(math.log2(n))
    hl = 2 * params.t_chd()
    low_check = {j: params.t_cld(params.power(j)) * probe for j in [-1, *range(1, s)]}
    frac_check = params.t_chl() * probe

    sampled = {i: (0 if params.li_trivial(i) else min(n, params.li_samples(i))) for i in range(s + 1)}
    low_is = sum(
        sampled[i] * (low_check.get(i, 0) + low_check.get(-1 if i <= 1 else i - 1, 0)) for i in range(s + 1)
    )
    low_cost = sum(sampled[i] * params.power(s - i) for i in range(s + 1))

    rounds = params.hde_rounds()
    bs = 2 * binary_search_rounds(n, params.hde_delta(), params.tunables.c_bs) + 1
    calls = sum(params.eta_steps(k) for k in range(s + 1, beta + 1)) * (tau + 1)
    hde_direct = calls * rounds * (2 + bs + 2)
    touched = min(n, 2 * rounds * calls)
    per_vertex_high = max(0, beta - s - 1) * 2 * params.t_chd() + (beta - s) * tau * frac_check
    high_cost = min(n * (beta - s) * (tau + 1), 2 * rounds * calls)

    return {
        "is_queries": int(n * hl + low_is + hde_direct + touched * per_vertex_high),
        "abstract_cost": float(low_cost + high_cost),
    }


@dataclass
class RunReport:
    m_tilde: float
    advice_trace: list = field(default_factory=list)
    is_queries: int = 0
    abstract_cost: float = 0.0
    seed: int | None = None
    wall_time: float = 0.0
    phase_queries: dict = field(default_factory=dict)
    analytic_budget: dict = field(default_factory=dict)
    n: int = 0
    eps: float = 0.0
    tunables: dict = field(default_factory=dict)
    winner: str = "primary"

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION}
        out.update(asdict(self))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _halving(
    eps: float,
    n: int,
    oracle: IndependenceOracle,
    rng,
    tunables: Tunables,
    advice,
    report: RunReport,
) -> float:
    with oracle.phase("emptiness"):
        if oracle.is_independent(np.arange(n)):
            return 0.0
    m_bar = n * (n - 1) // 2
    while m_bar >= 1:
        if advice is None:
            res = estimate_with_advice(eps / 11, n, m_bar, oracle, rng, tunables)
            m_hat = float(res.m_hat)
            budget = advice_budget(res.params)
            report.abstract_cost += res.abstract_cost
            for key, val in budget.items():
                report.analytic_budget[key] = report.analytic_budget.get(key, 0) + val
            entry = {"m_bar": m_bar, "m_hat": m_hat, "is_queries": res.is_queries, "memo": res.memo}
        else:
            m_hat = float(advice(m_bar))
            entry = {"m_bar": m_bar, "m_hat": m_hat}
        accepted = bool(4 * m_hat >= m_bar)
        entry["accepted"] = accepted
        report.advice_trace.append(entry)
        if accepted:
            return m_hat
        m_bar //= 2
    return 0.0


def estimate_edges(
    eps: float,
    n: int,
    oracle: IndependenceOracle,
    rng,
    fallback=None,
    tunables: Tunables | None = None,
    advice=None,
    seed: int | None = None,
) -> RunReport:
    """Estimate the number of edges within a ``1 +- eps`` factor.

    ``advice``, when given, replaces the inner estimator by a function of
    ``m_bar`` (used to test the halving logic in isolation). ``fallback`` is
    an optional second estimator ``fallback(oracle, rng) -> float``. It runs
    in lock-step with this one, one query each in turn, and the first to
    finish supplies the answer.
    """
    if not 0 < eps < 1:
        raise InvalidInputError("eps must lie in (0, 1)")
    if n < 2:
        raise InvalidInputError("need n >= 2")
    tunables = tunables or Tunables()
    report = RunReport(m_tilde=0.0, seed=seed, n=n, eps=eps, tunables=tunables.to_dict())
    report.analytic_budget = {"is_queries": 1, "abstract_cost": 0.0}
    start_count = oracle.is_query_count
    start_phases = dict(oracle.phase_counts)
    t0 = time.perf_counter()
    if fallback is None:
        report.m_tilde = _halving(eps, n, oracle, rng, tunables, advice, report)
    else:
        fb_rng = np.random.default_rng(draw_seed(rng))
        winner, value = run_lockstep(
            oracle,
            lambda o: _halving(eps, n, o, rng, tunables, advice, report),
            lambda o: fallback(o, fb_rng),
        )
        report.m_tilde, report.winner = float(value), winner
    report.wall_time = time.perf_counter() - t0
    report.is_queries = oracle.is_query_count - start_count
    report.phase_queries = {
        k: v - start_phases.get(k, 0) for k, v in oracle.phase_counts.items() if v - start_phases.get(k, 0)
    }
    return report


class _Stopped(Exception):
    pass


class _TurnOracle(IndependenceOracle):
    """Proxy that lets two algorithms share one oracle in alternation."""

    def __init__(self, inner: IndependenceOracle, side: int, state: dict):
        super().__init__(inner.n)
        self._inner = inner
        self._side = side
        self._state = state

    def _wait_turn(self, cost: int):
        st = self._state
        with st["cv"]:
            other = 1 - self._side
            while not st["done"] and not st["finished"][other] and st["spent"][self._side] > st["spent"][other]:
                st["cv"].wait()
            if st["done"]:
                raise _Stopped
            st["spent"][self._side] += cost
            st["cv"].notify_all()

    def _answer_one(self, members):
        self._wait_turn(1)
        with self._inner.phase(self._phases[-1]):
            return self._inner.is_independent(members)

    def _answer_many(self, batch):
        self._wait_turn(batch.n_queries)
        with self._inner.phase(self._phases[-1]):
            return self._inner.dependent_rows(batch)


def run_lockstep(oracle: IndependenceOracle, first, second):
    """Run ``first(o)`` and ``second(o)`` alternately on proxies of ``oracle``.

    Queries are granted to whichever side has spent fewer so far. Returns
    ``("primary" | "fallback", value)`` for the side that returns first; the
    other side is stopped at its next query.
    """
    state = {"cv": threading.Condition(), "done": False, "spent": [0, 0], "finished": [False, False]}
    results: list = [None, None]
    errors: list = [None, None]
    order: list = []

    def runner(side, fn):
        proxy = _TurnOracle(oracle, side, state)
        try:
            value = fn(proxy)
            with state["cv"]:
                if not state["done"]:
                    state["done"] = True
                    order.append(side)
                results[side] = value
        except _Stopped:
            pass
        except BaseException as exc:  # surfaced in the caller's thread
            errors[side] = exc
            with state["cv"]:
                state["done"] = True
        finally:
            with state["cv"]:
                state["finished"][side] = True
                state["cv"].notify_all()

    threads = [threading.Thread(target=runner, args=(i, fn), daemon=True) for i, fn in enumerate((first, second))]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for exc in errors:
        if exc is not None:
            raise exc
    side = order[0]
    return ("primary" if side == 0 else "fallback"), results[side]
