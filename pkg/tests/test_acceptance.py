"""Acceptance criteria, one PASS/FAIL line each.

Every criterion is measured as stated with its tolerance pinned below. A
criterion that cannot be met on this machine fails and prints the numbers
behind the failure. Set ``ISESTIMATE_FULL_ACCEPTANCE=1`` to lift the wall
clock caps that stop the long runs early.
"""

from __future__ import annotations

import itertools
import math
import os
import time

import numpy as np
import pytest

import conftest
from fixture_suite import build_suite, window_violations
from isestimate.bench import BenchConfig, cmd_bench
from isestimate.degree_oracle import MemoizedDegreeOracle, check_high_degree, check_hl_degree, check_low_degree
from isestimate.estimator import advice_budget, estimate_edges
from isestimate.generators import (
    gen_complete_bipartite,
    gen_coupled,
    gen_dno,
    gen_dyes,
    gen_erdos_renyi,
    gen_matching,
    gen_star,
    gen_union,
)
from isestimate.lowerbound import distinguishing_experiment, simulate_is_via_augmented
from isestimate.oracle import InstrumentedOracle, from_sets
from isestimate.params import Params, Tunables
from isestimate.rng import keyed_rng, sample_bernoulli_subset
from isestimate.search import binary_search_rounds, random_binary_search

FULL = os.environ.get("ISESTIMATE_FULL_ACCEPTANCE") == "1"

# pinned tolerances and budgets (seconds)
C1_RANDOM_SUBSETS, C1_N, C1_SECONDS = 10_000, 1000, 10.0
C2_FIXTURES, C2_DRAWS, C2_SLACK, C2_SECONDS = 20, 10_000, 0.04, 30.0
C3_INPUTS, C3_DELTA, C3_MAX_FAIL_RATE, C3_SECONDS = 1000, 0.01, 0.03, 10.0
C4_SEEDS, C4_MIN_RATE, C4_SECONDS = 100, 0.95, 300.0
C5_SEEDS, C5_MIN_RATE, C5_SECONDS = 20, 0.95, 300.0
C6_TRIALS, C6_MIN_HITS, C6_EPS, C6_SECONDS = 100, 90, 0.25, 1800.0
C7_BAND, C7_SECONDS = 8.0, 1800.0
C8_N, C8_DRAWS, C8_MIN_RATE, C8_SECONDS = 4096, 200, 0.95, 120.0
C9_INSTANCES, C9_SECONDS = 20, 600.0
C10_N, C10_TRIALS, C10_MAX_ADV, C10_MIN_GT, C10_SECONDS = 2**14, 1000, 0.1, 0.9, 600.0


def report(number, ok, summary):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {summary}"
    conftest.ACCEPTANCE_RESULTS.append(line)
    print(line)
    return ok


def pair_scan(edge_set, S):
    """Reference answer: every pair of S against a plain set of edges."""
    return not any((a, b) in edge_set for a, b in itertools.combinations(sorted(S), 2))


def edge_scan(edge_list, S):
    """Reference answer for large S: walk the edge list once."""
    inside = set(S)
    return not any(a in inside and b in inside for a, b in edge_list)


# 1 --------------------------------------------------------------------------


def test_c1_oracle_matches_brute_force():
    t0 = time.perf_counter()
    mismatches = 0
    exhaustive = 0
    for n, seed in [(8, 0), (10, 1), (12, 2), (12, 3)]:
        rng = np.random.default_rng(seed)
        g = gen_erdos_renyi(n, 0.3, rng)
        edges = {tuple(e) for e in g.edges.tolist()}
        o = InstrumentedOracle(g)
        for mask in range(1 << n):
            S = [v for v in range(n) if mask >> v & 1]
            mismatches += o.is_independent(S) != pair_scan(edges, S)
            exhaustive += 1

    rng = np.random.default_rng(10)
    g = gen_erdos_renyi(C1_N, 4.0 / C1_N, rng)
    edge_list = [tuple(e) for e in g.edges.tolist()]
    edges = set(edge_list)
    o = InstrumentedOracle(g)
    sets = []
    for i in range(C1_RANDOM_SUBSETS):
        # mostly small sets so both answers are common, plus some large ones
        k = int(rng.integers(0, 60)) if i % 10 else int(rng.integers(60, C1_N + 1))
        sets.append(rng.choice(C1_N, size=k, replace=False).tolist())
    batch_dep = set(o.dependent_rows(from_sets(sets)).tolist())
    n_indep = 0
    for r, S in enumerate(sets):
        ref = pair_scan(edges, S) if len(S) <= 60 else edge_scan(edge_list, S)
        n_indep += ref
        mismatches += (o.is_independent(S) != ref) + ((r not in batch_dep) != ref)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < C1_SECONDS
    report(
        1,
        ok,
        f"{exhaustive} exhaustive + {C1_RANDOM_SUBSETS} random subsets (single and batched, "
        f"{n_indep} independent), mismatches={mismatches}, {elapsed:.1f}s (limit {C1_SECONDS:.0f}s)",
    )
    assert ok


# 2 --------------------------------------------------------------------------


def _subset_fixtures():
    rng = np.random.default_rng(20)
    out = []
    er = gen_erdos_renyi(300, 0.05, rng)
    star = gen_star(200)
    kab = gen_complete_bipartite(20, 30)
    match = gen_matching(400)
    mixed = gen_union(gen_star(100), gen_matching(100))
    graphs = [er, star, kab, match, mixed]
    targets = [0.05, 0.2, 0.35, 0.5]
    for g in graphs:
        for target in targets:
            k = int(rng.integers(g.n // 4, g.n + 1))
            S = np.sort(rng.choice(g.n, size=k, replace=False))
            inside = np.zeros(g.n, dtype=bool)
            inside[S] = True
            e = g.edges
            r = int(np.count_nonzero(inside[e[:, 0]] & inside[e[:, 1]])) if len(e) else 0
            if r == 0:
                S, r = np.arange(g.n), g.m
            p = min(1.0, math.sqrt(target / r))
            out.append((g, S, p, r))
    return out[:C2_FIXTURES]


def test_c2_random_subset_bound():
    t0 = time.perf_counter()
    fixtures = _subset_fixtures()
    worst = math.inf
    failures = []
    for idx, (g, S, p, r) in enumerate(fixtures):
        assert r * p * p <= 0.5 + 1e-12
        o = InstrumentedOracle(g)
        rng = np.random.default_rng(200 + idx)
        hits = sum(o.is_independent(sample_bernoulli_subset(S, p, rng)) for _ in range(C2_DRAWS))
        freq = hits / C2_DRAWS
        bound = 1 - r * p * p - C2_SLACK
        worst = min(worst, freq - bound)
        if freq < bound:
            failures.append(f"#{idx} freq={freq:.4f} < {bound:.4f}")
    elapsed = time.perf_counter() - t0
    ok = len(fixtures) == C2_FIXTURES and not failures and elapsed < C2_SECONDS
    report(
        2,
        ok,
        f"{len(fixtures)} fixtures x {C2_DRAWS} draws, min margin over bound={worst:+.4f}, "
        f"violations={failures or 0}, {elapsed:.1f}s (limit {C2_SECONDS:.0f}s)",
    )
    assert ok


# 3 --------------------------------------------------------------------------


def test_c3_binary_search():
    t0 = time.perf_counter()
    rng = np.random.default_rng(30)
    graphs = [gen_erdos_renyi(1000, p, rng) for p in (0.0005, 0.002, 0.01)]
    graphs.append(gen_star(1000))
    graphs.append(gen_matching(1000))
    failures = over_budget = 0
    worst_queries = 0
    limit = 2 * binary_search_rounds(1000, C3_DELTA) + 1
    done = 0
    while done < C3_INPUTS:
        g = graphs[done % len(graphs)]
        edges = g.edges
        k = int(rng.integers(2, g.n + 1))
        T = rng.choice(g.n, size=k, replace=False)
        inside = np.zeros(g.n, dtype=bool)
        inside[T] = True
        if not np.any(inside[edges[:, 0]] & inside[edges[:, 1]]):
            continue  # promise: T spans an edge
        o = InstrumentedOracle(g)
        out = random_binary_search(o, T, C3_DELTA, np.random.default_rng(done))
        used = o.is_query_count
        worst_queries = max(worst_queries, used)
        over_budget += used > limit
        if out is None or not (inside[out[0]] and inside[out[1]] and g.has_edge(*out)):
            failures += 1
        done += 1
    elapsed = time.perf_counter() - t0
    rate = failures / C3_INPUTS
    ok = rate <= C3_MAX_FAIL_RATE and over_budget == 0 and elapsed < C3_SECONDS
    report(
        3,
        ok,
        f"{C3_INPUTS} inputs, failure rate={rate:.3f} (max {C3_MAX_FAIL_RATE}), "
        f"max queries={worst_queries} (limit 2t+1={limit}), {elapsed:.1f}s (limit {C3_SECONDS:.0f}s)",
    )
    assert ok


# 4 --------------------------------------------------------------------------


def _run_check(fx, check, seed):
    kind, u, arg, _ = check
    p = fx.params
    deg = MemoizedDegreeOracle(InstrumentedOracle(fx.graph), p, seed)
    rng = keyed_rng(seed, 7)
    if kind == "hl":
        return deg.high_low(u)
    if kind == "chd":
        return check_high_degree(deg.oracle, u, arg, p, rng)
    if kind == "cld":
        return check_low_degree(deg.oracle, deg, u, arg, p, rng)
    return check_hl_degree(deg.oracle, deg, u, *arg, p, rng)


def test_c4_degree_oracle_soundness():
    t0 = time.perf_counter()
    suite = build_suite()
    worst = (1.0, "")
    n_checks = 0
    for fx in suite:
        for check in fx.checks:
            right = sum(_run_check(fx, check, seed) == check[3] for seed in range(C4_SEEDS))
            n_checks += 1
            rate = right / C4_SEEDS
            if rate < worst[0] or not worst[1]:
                worst = (rate, f"{fx.name}/{check[0]}@{check[1]}")
    elapsed = time.perf_counter() - t0
    ok = worst[0] >= C4_MIN_RATE and elapsed < C4_SECONDS
    report(
        4,
        ok,
        f"{len(suite)} graphs, {n_checks} checks x {C4_SEEDS} seeds, worst rate={worst[0]:.2f} "
        f"({worst[1]}, min {C4_MIN_RATE}), {elapsed:.0f}s (limit {C4_SECONDS:.0f}s)",
    )
    assert ok


# 5 --------------------------------------------------------------------------


def test_c5_partition_windows():
    t0 = time.perf_counter()
    suite = build_suite()
    total = len(suite) * C5_SEEDS
    good = done = 0
    bad_examples = []
    stopped = False
    for seed in range(C5_SEEDS):
        for fx in suite:
            if not FULL and time.perf_counter() - t0 > C5_SECONDS:
                stopped = True
                break
            deg = MemoizedDegreeOracle(InstrumentedOracle(fx.graph), fx.params, seed)
            bad = window_violations(fx.graph, deg)
            done += 1
            good += not bad
            if bad and len(bad_examples) < 3:
                bad_examples.append(f"{fx.name}/seed{seed}: {bad[0]}")
        if stopped:
            break
    elapsed = time.perf_counter() - t0
    rate = good / done if done else 0.0
    projected = elapsed / done * total if done else math.inf
    ok = done == total and rate >= C5_MIN_RATE and elapsed < C5_SECONDS
    report(
        5,
        ok,
        f"{done}/{total} (graph, seed) runs in {elapsed:.0f}s, windows held in {rate:.2f} "
        f"(min {C5_MIN_RATE}), projected full panel {projected / 60:.1f} min (limit "
        f"{C5_SECONDS / 60:.0f} min){'; ' + '; '.join(bad_examples) if bad_examples else ''}",
    )
    assert ok


# 6 --------------------------------------------------------------------------


def _faithful_lower_bound(n: int, m: int) -> int:
    """Queries a faithful run must make at least, counted from its first advice call alone.

    The first advice value is C(n, 2). Its high-degree scan starts at
    eta = 1 for every (k, l) bucket and makes ``hde_rounds`` sampling rounds
    there, each with at least one query, before any bucket can drop out.
    """
    p = Params(C6_EPS / 11, n, n * (n - 1) // 2)
    buckets = (p.beta - p.s) * (p.tau + 1)
    return buckets * p.hde_rounds()


def test_c6_end_to_end_faithful():
    t0 = time.perf_counter()
    rng = np.random.default_rng(60)
    instances = []
    for n in (256, 512):
        instances.append((f"er{n}", gen_erdos_renyi(n, 8.0 / n, rng)))
        with pytest.warns(UserWarning):
            instances.append((f"dyes{n}", gen_dyes(n, 4 * n, rng).graph))

    # measured throughput: one event round is a batch of random sets of
    # roughly the size the scan uses at eta = 1
    g = instances[-1][1]
    o = InstrumentedOracle(g)
    sets = [rng.choice(g.n, size=g.n // 2, replace=False) for _ in range(200)]
    tq = time.perf_counter()
    for _ in range(5):
        o.dependent_rows(from_sets(sets))
    per_query = (time.perf_counter() - tq) / o.is_query_count

    needed = sum(_faithful_lower_bound(g.n, g.m) for _, g in instances) * C6_TRIALS
    projected = needed * per_query
    budget = advice_budget(Params(C6_EPS / 11, 256, 256 * 255 // 2))["is_queries"]
    elapsed = time.perf_counter() - t0
    ok = projected < C6_SECONDS
    report(
        6,
        ok,
        f"not run: {len(instances)} instances x {C6_TRIALS} trials need >= {needed:.2e} IS queries "
        f"(first advice call alone; analytic budget per call at n=256 is {budget:.2e}); "
        f"measured {per_query * 1e6:.2f} us/query, projected >= {projected / 3.15e7:.1e} years "
        f"vs limit {C6_SECONDS / 60:.0f} min ({elapsed:.1f}s spent measuring)",
    )
    assert ok


# 7 --------------------------------------------------------------------------


def test_c7_query_scaling():
    t0 = time.perf_counter()
    config = BenchConfig()
    rows = [r for r in cmd_bench(config) if r["kind"] == "trial"]
    over = [r for r in rows if r["is_queries"] > r["analytic_budget"]]
    ratios = {r["n"]: r["is_queries"] / (r["n"] / math.sqrt(r["m_exact"])) for r in rows}
    spread = max(ratios.values()) / min(ratios.values())
    elapsed = time.perf_counter() - t0
    ok = not over and spread <= C7_BAND and elapsed < C7_SECONDS
    detail = ", ".join(f"n={n}: {v:.3g}" for n, v in sorted(ratios.items()))
    report(
        7,
        ok,
        f"lambda={config.tunables.lam}, c_hde={config.tunables.c_hde}, eps={config.eps}; "
        f"budget exceeded in {len(over)}/{len(rows)} trials; queries/(n/sqrt m) {detail}; "
        f"spread {spread:.1f}x (band {C7_BAND:.0f}x), {elapsed:.0f}s (limit {C7_SECONDS / 60:.0f} min)",
    )
    assert not over, "is_queries exceeded the analytic budget"
    assert ok


# 8 --------------------------------------------------------------------------


def test_c8_planted_separation():
    t0 = time.perf_counter()
    m = 12 * C8_N
    yes_ok = no_ok = 0
    with pytest.warns(UserWarning):
        for i in range(C8_DRAWS):
            yes_ok += gen_dyes(C8_N, m, np.random.default_rng(2 * i)).edge_count <= m / 2
            no_ok += gen_dno(C8_N, m, np.random.default_rng(2 * i + 1)).edge_count >= m
    elapsed = time.perf_counter() - t0
    ok = yes_ok / C8_DRAWS >= C8_MIN_RATE and no_ok / C8_DRAWS >= C8_MIN_RATE and elapsed < C8_SECONDS
    report(
        8,
        ok,
        f"n={C8_N}, m=12n: light |E|<=m/2 in {yes_ok}/{C8_DRAWS}, heavy |E|>=m in {no_ok}/{C8_DRAWS} "
        f"(min {C8_MIN_RATE}), {elapsed:.1f}s (limit {C8_SECONDS:.0f}s)",
    )
    assert ok


# 9 --------------------------------------------------------------------------


def test_c9_simulation_replay():
    t0 = time.perf_counter()
    tun = Tunables(lam=1e-4, c_hde=1e-12)
    n, m = 128, 512
    same = 0
    queries = 0
    pairs = [gen_coupled(n, m, seed) for seed in range(C9_INSTANCES // 2)]
    for idx, inst in enumerate(x for pair in pairs for x in pair):

        def algo(oracle, idx=idx):
            return estimate_edges(0.5, n, oracle, np.random.default_rng(idx), tunables=tun).m_tilde

        sim = simulate_is_via_augmented(algo, inst, np.random.default_rng(1000 + idx))
        direct = InstrumentedOracle(inst.graph, record=True)
        value = algo(direct)
        same += sim.value == value and sim.transcript == direct.transcript
        queries += direct.is_query_count
    elapsed = time.perf_counter() - t0
    ok = same == C9_INSTANCES and elapsed < C9_SECONDS
    report(
        9,
        ok,
        f"{same}/{C9_INSTANCES} planted instances (n={n}) replayed with identical estimate and "
        f"transcript, {queries:.2e} IS queries answered, {elapsed:.0f}s (limit {C9_SECONDS / 60:.0f} min)",
    )
    assert ok


# 10 -------------------------------------------------------------------------


def test_c10_distinguishing_advantage():
    t0 = time.perf_counter()
    m = 16 * C10_N
    scan = distinguishing_experiment("singleton-scan", C10_N, m, C10_TRIALS, np.random.default_rng(100))
    truth = distinguishing_experiment("ground-truth", C10_N, m, C10_TRIALS, np.random.default_rng(101))
    elapsed = time.perf_counter() - t0
    ok = scan.advantage <= C10_MAX_ADV and truth.advantage >= C10_MIN_GT and elapsed < C10_SECONDS
    report(
        10,
        ok,
        f"n=2^14, m=16n, budget q={scan.budget}: singleton-scan advantage {scan.advantage:.3f} "
        f"[{scan.ci_low:.3f}, {scan.ci_high:.3f}] (max {C10_MAX_ADV}), ground truth "
        f"{truth.advantage:.3f} (min {C10_MIN_GT}), {elapsed:.0f}s (limit {C10_SECONDS / 60:.0f} min)",
    )
    assert ok
