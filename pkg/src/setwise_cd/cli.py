"""Command-line interface.

Subcommands: gen-graph, run, experiment-decentralized, experiment-paramserver,
verify, estimate-rate. Outputs are deterministic JSON/CSV files (summaries
carry a timestamp field that callers should ignore when comparing).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .dual import load_problem_config
from .engine import BACKEND, RunConfig, Trace, run
from .graph import build_graph, circulant_regular, save_graph
from .rates import estimate_rate
from .verify import verify


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, default=1, help="master seed")
    parser.add_argument("--iterations", type=int, help="iteration count override")
    parser.add_argument("--seeds", type=int, default=20,
                        help="number of seeds for experiments")


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        return json.loads(Path(args.config).read_text())
    return {}


def _cmd_gen_graph(args) -> int:
    if args.edges:
        g = build_graph(args.n, json.loads(args.edges))
    else:
        if args.degree is None:
            print("gen-graph needs --degree (circulant) or --edges", file=sys.stderr)
            return 2
        g = circulant_regular(args.n, args.degree)
    save_graph(g, args.graph_file)
    print(f"wrote {args.graph_file} (n={g.n}, E={g.num_edges})")
    return 0


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    if not cfg:
        print("run needs --config with a problem description", file=sys.stderr)
        return 2
    problem, state = load_problem_config(args.config)
    iterations = args.iterations or int(cfg.get("iterations", 10_000))
    run_cfg = RunConfig(
        algorithm=args.algorithm,
        iterations=iterations,
        seed=args.seed,
        eta=args.eta,
        record_every=args.record_every,
    )
    trace = run(problem, run_cfg, initial_state=state)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"trace_{args.algorithm}_seed{args.seed}"
    trace.to_csv(args.out / f"{stem}.csv")
    (args.out / f"{stem}.json").write_text(
        json.dumps(trace.sidecar_dict(), sort_keys=True, indent=2) + "\n"
    )
    print(
        f"{args.algorithm} run: {iterations} iterations, "
        f"final suboptimality {trace.final_suboptimality:.3e}, "
        f"messages {trace.messages} -> {args.out / stem}.csv"
    )
    return 0


def _cmd_experiment_decentralized(args) -> int:
    cfg = _load_config(args)
    summary = experiments.experiment_decentralized(
        degree=args.degree,
        seeds=args.seeds,
        iterations=args.iterations or int(cfg.get("iterations", 40_000)),
        master_seed=args.seed,
        out_dir=args.out,
    )
    _print_summary(summary)
    return 0


def _cmd_experiment_paramserver(args) -> int:
    cfg = _load_config(args)
    summary = experiments.experiment_paramserver(
        n_sets=args.n_sets,
        set_size=args.set_size,
        seeds=args.seeds,
        iterations=args.iterations or int(cfg.get("iterations", 50_000)),
        master_seed=args.seed,
        out_dir=args.out,
    )
    _print_summary(summary)
    return 0


def _print_summary(summary) -> None:
    d = summary.to_dict()
    print(
        f"{d['setting']}: n={d['n']} N_max={d['N_max']} "
        f"rho_U={d['rho_U']:.4e} rho_G={d['rho_G']:.4e} ratio={d['ratio']:.2f} "
        f"(bounds [{d['bound_su']:.2e}, {d['bound_sgs']:.2e}])"
    )


def _cmd_verify(args) -> int:
    report = verify(level=args.level, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"verify_{args.level}.json"
    path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}")
    print(f"report -> {path}")
    return 0 if report.passed else 1


def _cmd_estimate_rate(args) -> int:
    trace = Trace.from_csv(args.trace)
    est = estimate_rate(trace, window_fraction=args.window_fraction)
    print(json.dumps(
        {
            "rho": est.rho,
            "window": list(est.window),
            "residual": est.residual,
            "n_points": est.n_points,
            "log_range": est.log_range,
            "floor_reached": est.floor_reached,
        },
        sort_keys=True,
    ))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setwise-cd",
        description=(
            "Set-wise coordinate descent simulator "
            f"(kernel backend: {BACKEND})"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="write a graph JSON file")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, help="circulant degree (even)")
    p.add_argument("--edges", help="explicit edge list as JSON, e.g. [[0,1],[1,2]]")
    p.add_argument("--graph-file", type=Path, required=True)
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("run", help="single simulation run from a problem config")
    _add_common(p)
    p.add_argument("--algorithm", choices=["su", "sgs"], default="su")
    p.add_argument("--eta", type=float, help="explicit stepsize (default 1/L)")
    p.add_argument("--record-every", type=int, default=100)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("experiment-decentralized",
                       help="regular-graph consensus benchmark")
    _add_common(p)
    p.add_argument("--degree", type=int, default=8)
    p.set_defaults(func=_cmd_experiment_decentralized)

    p = sub.add_parser("experiment-paramserver",
                       help="shared-vector benchmark with overlapping sets")
    _add_common(p)
    p.add_argument("--n-sets", type=int, default=24)
    p.add_argument("--set-size", type=int, default=4)
    p.set_defaults(func=_cmd_experiment_paramserver)

    p = sub.add_parser("verify", help="run the analysis verification suite")
    _add_common(p)
    p.add_argument("--level", choices=["fast", "full"], default="fast")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("estimate-rate", help="fit a contraction rate to a trace CSV")
    _add_common(p)
    p.add_argument("--trace", type=Path, required=True)
    p.add_argument("--window-fraction", type=float, default=1 / 3)
    p.set_defaults(func=_cmd_estimate_rate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
