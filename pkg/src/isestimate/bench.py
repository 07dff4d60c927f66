"""Benchmark grid runner and instance families shared with the CLI."""

from __future__ import annotations

import csv
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field


from . import generators as gen
from .errors import InvalidInputError
from .estimator import estimate_edges
from .oracle import InstrumentedOracle
from .params import Tunables
from .rng import keyed_rng, draw_seed, substream

BENCH_COLUMNS = [
    "kind",
    "n",
    "m_exact",
    "eps",
    "lambda",
    "seed",
    "m_tilde",
    "rel_error",
    "is_queries",
    "abstract_cost",
    "analytic_budget",
    "wall_ms",
    "success_rate",
]

FAMILIES = ("er", "star", "complete-bipartite", "matching", "empty", "dyes", "dno")


def parse_family(spec: str) -> tuple[str, dict]:
    """``"er:n=256,m=1024"`` -> ``("er", {"n": 256, "m": 1024})``."""
    name, _, rest = spec.partition(":")
    if name not in FAMILIES:
        raise InvalidInputError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    kwargs = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidInputError(f"bad family parameter {item!r}")
        kwargs[key.strip()] = float(val) if any(c in val for c in ".eE") else int(val)
    return name, kwargs


def build_family(name: str, kw: dict, seed: int):
    """Return ``(graph, extra_sidecar_fields)`` for a named family."""
    rng = substream(seed, "graph-gen")
    try:
        if name == "er":
            n = int(kw["n"])
            p = kw["p"] if "p" in kw else (2.0 * kw["m"] / (n * (n - 1)) if n > 1 else 0.0)
            return gen.gen_erdos_renyi(n, min(1.0, p), rng), {}
        if name == "star":
            return gen.gen_star(int(kw["n"])), {}
        if name == "complete-bipartite":
            return gen.gen_complete_bipartite(int(kw["a"]), int(kw["b"])), {}
        if name == "matching":
            return gen.gen_matching(int(kw["n"])), {}
        if name == "empty":
            return gen.gen_empty(int(kw["n"])), {}
        inst = (gen.gen_dyes if name == "dyes" else gen.gen_dno)(int(kw["n"]), kw["m"], rng)
        return inst.graph, inst.sidecar()
    except KeyError as exc:
        raise InvalidInputError(f"family {name!r} needs parameter {exc.args[0]!r}") from None


@dataclass
class BenchConfig:
    grid: list = field(default_factory=lambda: [(256, 1024), (512, 2048), (1024, 4096), (2048, 8192)])
    family: str = "er"
    eps: float = 0.9
    trials: int = 1
    seed: int = 0
    workers: int = 1
    tunables: Tunables = field(default_factory=lambda: Tunables(lam=1e-4, c_hde=1e-12))


def run_trial(config: BenchConfig, point: int, trial: int) -> dict:
    n, m_target = config.grid[point]
    seed = draw_seed(keyed_rng(config.seed, point, trial))
    g, _ = build_family(config.family, {"n": n, "m": m_target}, seed)
    oracle = InstrumentedOracle(g)
    t0 = time.perf_counter()
    report = estimate_edges(config.eps, n, oracle, substream(seed, "estimator"), tunables=config.tunables, seed=seed)
    wall = (time.perf_counter() - t0) * 1000
    m = g.m
    rel = abs(report.m_tilde - m) / m if m else float(report.m_tilde != 0)
    return {
        "kind": "trial",
        "n": n,
        "m_exact": m,
        "eps": config.eps,
        "lambda": config.tunables.lam,
        "seed": seed,
        "m_tilde": report.m_tilde,
        "rel_error": rel,
        "is_queries": report.is_queries,
        "abstract_cost": report.abstract_cost,
        "analytic_budget": report.analytic_budget["is_queries"],
        "wall_ms": round(wall, 3),
        "success_rate": "",
    }


def _run_job(args):
    return run_trial(*args)


def cmd_bench(config: BenchConfig) -> list[dict]:
    """One row per trial in (grid point, trial) order, then one summary row per grid point."""
    jobs = [(config, p, t) for p in range(len(config.grid)) for t in range(config.trials)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = [run_trial(*job) for job in jobs]
    summaries = []
    for p, (n, _) in enumerate(config.grid):
        mine = rows[p * config.trials : (p + 1) * config.trials]
        if not mine:
            continue
        med = {k: statistics.median(r[k] for r in mine) for k in ("m_exact", "m_tilde", "rel_error", "is_queries", "abstract_cost", "analytic_budget", "wall_ms")}
        summaries.append(
            {
                "kind": "summary",
                "n": n,
                "eps": config.eps,
                "lambda": config.tunables.lam,
                "seed": "",
                **med,
                "success_rate": sum(r["rel_error"] <= config.eps for r in mine) / len(mine),
            }
        )
    return rows + summaries


def write_csv(rows: list[dict], path_or_handle, columns=BENCH_COLUMNS) -> None:
    def _write(fh):
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, "") for c in columns})

    if hasattr(path_or_handle, "write"):
        _write(path_or_handle)
    else:
        with open(path_or_handle, "w", newline="", encoding="utf-8") as fh:
            _write(fh)
