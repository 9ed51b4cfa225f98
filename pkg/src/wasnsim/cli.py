"""Command-line entry point.

Subcommands: ``run`` (execute a config), ``sweep`` (the connectivity-
vs-convergence protocol with paper-shaped defaults), ``prune-stats``
(MST vs MMUT tree statistics), and ``plot`` (render a CSV to SVG).
Exits 0 on success, 2 on invalid configuration, 3 on runtime failure.
"""
import argparse
import sys
from dataclasses import replace

from .errors import ConfigInvalid, WasnSimError
from .harness import ExperimentConfig, load_config, prune_stats, run_experiment
from .plots import emit_plot


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--algorithm", action="append",
                        help="algorithm to run (repeatable)")
    parser.add_argument("--pruning", choices=("mst", "mmut"))
    parser.add_argument("--connectivity", action="append", type=float,
                        help="connectivity target in [0, 1] (repeatable)")
    parser.add_argument("--dynamic", action="store_true",
                        help="redraw the adjacency every iteration")
    parser.add_argument("--iterations", type=int, help="iteration count")
    parser.add_argument("--envs", type=int, help="number of environments")
    parser.add_argument("--gevd-rank", type=int,
                        help="enable GEVD updates with this rank")


def _build_config(args, base=None):
    config = base or ExperimentConfig()
    if args.config:
        config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out:
        overrides["out_dir"] = args.out
    if args.algorithm:
        overrides["algorithms"] = args.algorithm
    if args.pruning:
        overrides["pruning"] = args.pruning
    if args.connectivity:
        overrides["connectivity_targets"] = args.connectivity
    if args.dynamic:
        overrides["topology_mode"] = "dynamic"
    if args.iterations is not None:
        overrides["n_iterations"] = args.iterations
    if args.envs is not None:
        overrides["n_envs"] = args.envs
    if args.gevd_rank is not None:
        overrides["update_mode"] = "gevd"
        overrides["gevd_rank"] = args.gevd_rank
    return replace(config, **overrides)


def _sweep_defaults():
    return ExperimentConfig(
        algorithms=["danse", "ti-danse", "ti-danse+"],
        connectivity_targets=[0.0, 0.25, 0.5, 0.75, 1.0],
    )


def main(argv=None):
    parser = argparse.ArgumentParser(prog="wasnsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment")
    _add_common(p_run)

    p_sweep = sub.add_parser(
        "sweep", help="connectivity sweep with all algorithms"
    )
    _add_common(p_sweep)

    p_prune = sub.add_parser("prune-stats", help="MST vs MMUT statistics")
    p_prune.add_argument("--seed", type=int, default=0)
    p_prune.add_argument("--out", default="out")
    p_prune.add_argument("--k-nodes", type=int, nargs="+",
                         default=[6, 9, 12, 15])
    p_prune.add_argument("--wasns", type=int, default=50)

    p_plot = sub.add_parser("plot", help="render a CSV to SVG")
    p_plot.add_argument("csv")
    p_plot.add_argument("--kind", choices=("mse_w", "snr", "prune"),
                        default="mse_w")
    p_plot.add_argument("--out", default="plot.svg")

    args = parser.parse_args(argv)
    try:
        if args.command in ("run", "sweep"):
            base = _sweep_defaults() if args.command == "sweep" else None
            paths = run_experiment(_build_config(args, base))
            print(f"wrote {paths['csv']} and {paths['manifest']}")
        elif args.command == "prune-stats":
            paths = prune_stats(k_list=tuple(args.k_nodes), n_wasns=args.wasns,
                                seed=args.seed, out_dir=args.out)
            print(f"wrote {paths['detail']} and {paths['summary']}")
        elif args.command == "plot":
            out = emit_plot(args.csv, args.kind, args.out)
            print(f"wrote {out}")
    except ConfigInvalid as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (WasnSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
