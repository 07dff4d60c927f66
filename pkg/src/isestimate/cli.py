"""Command-line entry point: ``isestimate {gen,estimate,bench,lowerbound}``.

Exit codes: 0 success, 2 usage error, 3 I/O or input-file error,
4 contract violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bench import BENCH_COLUMNS, BenchConfig, build_family, cmd_bench, parse_family, write_csv
from .errors import BudgetExceededError, ContractViolationError, InvalidInputError
from .estimator import estimate_edges
from .graph import load_edgelist, save_edgelist
from .lowerbound import STRATEGIES, distinguishing_experiment
from .oracle import InstrumentedOracle
from .params import Tunables
from .rng import substream

EXIT_USAGE, EXIT_IO, EXIT_CONTRACT = 2, 3, 4

LOWERBOUND_COLUMNS = ["strategy", "advantage", "ci_low", "ci_high", "no_rate_heavy", "no_rate_light", "trials", "budget"]


class UsageError(Exception):
    pass


def load_config(path: str) -> dict:
    """Flat ``key=value`` lines or a JSON object; keys use flag names with dashes or underscores."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, val = line.partition("=")
            if not eq:
                raise UsageError(f"config line without '=': {line!r}")
            raw[key.strip()] = val.strip()
    return {k.replace("-", "_"): v for k, v in raw.items()}


def _coerce(action, value):
    if not isinstance(value, str):
        return value
    if action.type is not None:
        return action.type(value)
    if action.const is True:
        return value.lower() in ("1", "true", "yes", "on")
    return value


def _add_tunables(p):
    g = p.add_argument_group("loop-count multipliers")
    defaults = Tunables()
    g.add_argument("--lambda", dest="lam", type=float, default=None, help="global multiplier on loop counts, in (0, 1]")
    g.add_argument("--faithful", action="store_true", help="force --lambda 1")
    for name in ("c_bs", "c_chd", "c_cld", "c_chl", "c_hde", "c_li"):
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=float, default=None, help=f"default {getattr(defaults, name)}")


def _tunables(args, base: Tunables) -> Tunables:
    changes = {k: float(getattr(args, k)) for k in ("c_bs", "c_chd", "c_cld", "c_chl", "c_hde", "c_li", "lam") if getattr(args, k, None) is not None}
    if getattr(args, "faithful", False):
        changes["lam"] = 1.0
    return replace(base, **changes)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isestimate", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key=value or JSON file; flags given on the command line win")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated graph as an edge list plus a JSON sidecar")
    g.add_argument("--family", required=True, choices=["er", "star", "complete-bipartite", "matching", "empty", "dyes", "dno"])
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=float, help="target edge count (er, dyes, dno)")
    g.add_argument("--p", type=float, help="edge probability (er)")
    g.add_argument("--a", type=int)
    g.add_argument("--b", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    e = sub.add_parser("estimate", help="estimate the edge count of one graph")
    src = e.add_mutually_exclusive_group()
    src.add_argument("--input", help="edge-list file")
    src.add_argument("--family", help='generator spec such as "er:n=256,m=1024"')
    e.add_argument("--eps", type=float, default=0.5)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--fallback", choices=["none"], default="none")
    e.add_argument("--json", help="write the report here instead of stdout")
    e.add_argument("--csv", help="also write a one-row CSV summary")
    _add_tunables(e)

    b = sub.add_parser(
        "bench",
        help="run a benchmark grid",
        description="CSV columns, in order: " + ", ".join(BENCH_COLUMNS),
    )
    b.add_argument("--grid", help='comma list of n:m pairs, e.g. "256:1024,512:2048"')
    b.add_argument("--family", default="er", choices=["er", "dyes", "dno"])
    b.add_argument("--eps", type=float)
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--out", help="CSV path (default stdout)")
    _add_tunables(b)

    lb = sub.add_parser(
        "lowerbound",
        help="distinguishing experiment on coupled light/heavy instances",
        description="CSV columns, in order: " + ", ".join(LOWERBOUND_COLUMNS),
    )
    lb.add_argument("--n", type=int, required=True)
    lb.add_argument("--m", type=float, required=True)
    lb.add_argument("--trials", type=int, default=100)
    lb.add_argument("--strategy", choices=sorted(STRATEGIES), default="singleton-scan")
    lb.add_argument("--seed", type=int, default=0)
    lb.add_argument("--out", help="CSV path (default stdout)")
    return parser


def _gen(args) -> int:
    params = {k: getattr(args, k) for k in ("n", "m", "p", "a", "b") if getattr(args, k) is not None}
    g, extra = build_family(args.family, params, args.seed)
    save_edgelist(g, args.out)
    sidecar = {"schema": 1, "family": args.family, "params": params, "seed": args.seed, "edges": g.m, **extra}
    with open(args.out + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
    return 0


def _estimate(args) -> int:
    if args.input:
        g = load_edgelist(args.input)
        source = {"input": args.input}
    elif args.family:
        name, kw = parse_family(args.family)
        g, _ = build_family(name, kw, args.seed)
        source = {"family": args.family}
    else:
        raise UsageError("one of --input or --family is required")
    tun = _tunables(args, Tunables())
    oracle = InstrumentedOracle(g)
    report = estimate_edges(args.eps, g.n, oracle, substream(args.seed, "estimator"), tunables=tun, seed=args.seed)
    out = report.to_dict()
    out["source"] = source
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        row = {
            "kind": "trial",
            "n": g.n,
            "m_exact": "",
            "eps": args.eps,
            "lambda": tun.lam,
            "seed": args.seed,
            "m_tilde": report.m_tilde,
            "is_queries": report.is_queries,
            "abstract_cost": report.abstract_cost,
            "analytic_budget": report.analytic_budget["is_queries"],
            "wall_ms": round(report.wall_time * 1000, 3),
        }
        write_csv([row], args.csv)
    return 0


def _bench(args) -> int:
    cfg = BenchConfig()
    if args.grid:
        try:
            cfg.grid = [tuple(int(float(x)) for x in item.split(":")) for item in args.grid.split(",") if item]
        except ValueError:
            raise UsageError(f"bad --grid {args.grid!r}") from None
    cfg.family = args.family
    for key in ("eps", "trials", "seed", "workers"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    cfg.tunables = _tunables(args, cfg.tunables)
    if cfg.trials < 0:
        raise UsageError("--trials must be non-negative")
    rows = cmd_bench(cfg)
    write_csv(rows, args.out or sys.stdout)
    return 0


def _lowerbound(args) -> int:
    res = distinguishing_experiment(args.strategy, args.n, args.m, args.trials, np.random.default_rng(args.seed))
    row = {c: getattr(res, c) for c in LOWERBOUND_COLUMNS}
    write_csv([row], args.out or sys.stdout, LOWERBOUND_COLUMNS)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = load_config(args.config)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except (UsageError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        for a in sub._actions:
            for opt in a.option_strings:
                known.setdefault(opt.lstrip("-").replace("-", "_"), a)
        cfg = {known[k].dest if k in known else k: v for k, v in cfg.items()}
        unknown = [k for k in cfg if k not in known]
        if unknown:
            print(f"error: unknown config keys: {', '.join(unknown)}", file=sys.stderr)
            return EXIT_USAGE
        try:
            sub.set_defaults(**{k: _coerce(known[k], v) for k, v in cfg.items()})
        except ValueError as exc:
            print(f"error: bad config value: {exc}", file=sys.stderr)
            return EXIT_USAGE
        args = parser.parse_args(argv)
    handler = {"gen": _gen, "estimate": _estimate, "bench": _bench, "lowerbound": _lowerbound}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractViolationError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if args.command == "estimate" and args.input else EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
