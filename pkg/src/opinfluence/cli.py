"""Command-line entry point: ``opinfluence {run,verify-trichotomy,oracle,graph-gen}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, config_from_dict, validate_config
from .experiments import TRICHOTOMY_COLS, load_manifest, oracle_reports, run_experiment, trichotomy_rows
from .graphs import GraphSpec, GraphSpecError, degrees, generate, write_edge_list


def _load(path: str):
    text = Path(path).read_text()
    if path.endswith(".json"):
        return load_manifest(path)
    return validate_config(text)


def cmd_run(args) -> int:
    cfg = _load(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["n_trials"] = args.trials
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        cfg = config_from_dict({**cfg.to_dict(), **overrides})
    for path in run_experiment(cfg):
        print(path)
    return 0


def cmd_trichotomy(args) -> int:
    raw = {"kind": "trichotomy-sweep", "q_inf": args.q_inf, "p_inf": args.p_inf}
    if args.out:
        raw["out"] = args.out
    cfg = config_from_dict(raw)
    if args.out:
        run_experiment(cfg)
    rows = trichotomy_rows(cfg)
    idx = {c: i for i, c in enumerate(TRICHOTOMY_COLS)}
    for r in rows:
        print(f"T={r[idx['T']]:4d} M={r[idx['M']]:4d} b={r[idx['b']]:.2f} p={r[idx['p']]:.1f} q={r[idx['q']]:.1f} "
              f"SF-SL={r[idx['first_minus_last']]:+.3e} {'ok' if r[idx['agrees']] else 'MISMATCH'}")
    bad = sum(1 for r in rows if not r[idx["agrees"]])
    print(f"{len(rows) - bad}/{len(rows)} cells agree with sign(q - p)")
    return 0 if bad == 0 else 1


def cmd_oracle(args) -> int:
    raw = {
        "kind": "oracle-verify", "node_count": args.M, "T": args.T, "budgets": [args.b],
        "p_inf": args.p_inf, "q_inf": args.q_inf, "grid": [[args.p, args.q]],
        "effective": not args.no_effective, "beta0": [args.beta0],
    }
    if args.graph:
        raw["setting"] = "graph"
        raw["graphs"] = [{"kind": args.graph}]
    else:
        raw["k_support"] = [[int(k), float(w)] for k, w in (kv.split(":") for kv in args.k.split(","))]
    if args.out:
        raw["out"] = args.out
    cfg = config_from_dict(raw)
    if args.out:
        run_experiment(cfg)
    (_, _, rep), = oracle_reports(cfg)
    print(rep.to_json())
    return 0 if rep.prediction_holds else 1


def cmd_graph_gen(args) -> int:
    spec = GraphSpec(args.kind, args.M, args.d, args.edge_prob, args.m_attach, args.seed)
    g = generate(spec)
    if args.out:
        write_edge_list(g, args.out)
    deg = degrees(g)
    print(f"{spec.label()} M={g.node_count} E={g.edge_count} min_deg={min(deg)} max_deg={max(deg)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opinfluence")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a TOML config or a manifest.json")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("verify-trichotomy", help="mean-field sign check of first vs last schedules")
    t.add_argument("--p-inf", type=float, default=0.0)
    t.add_argument("--q-inf", type=float, default=0.9)
    t.add_argument("--out")
    t.set_defaults(func=cmd_trichotomy)

    o = sub.add_parser("oracle", help="exact expected outcome of every full-budget schedule")
    o.add_argument("--p", type=float, default=0.2)
    o.add_argument("--q", type=float, default=0.8)
    o.add_argument("--p-inf", type=float, default=0.0)
    o.add_argument("--q-inf", type=float, default=0.9)
    o.add_argument("--M", type=int, default=4)
    o.add_argument("--T", type=int, default=6)
    o.add_argument("--b", type=float, default=1 / 3)
    o.add_argument("--beta0", type=float, default=0.5)
    o.add_argument("--k", default="1:1.0", help="sample-size law as k:prob,k:prob")
    o.add_argument("--graph", choices=["complete", "hub_spoke"], help="use a graph instead of random sampling")
    o.add_argument("--no-effective", action="store_true")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("graph-gen", help="generate a graph and write it as an edge list")
    g.add_argument("--kind", required=True, choices=["complete", "d_regular", "erdos_renyi", "barabasi_albert", "hub_spoke"])
    g.add_argument("--M", type=int, required=True)
    g.add_argument("--d", type=int)
    g.add_argument("--edge-prob", type=float)
    g.add_argument("--m-attach", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return 2
    except (GraphSpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
