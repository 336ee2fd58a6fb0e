"""Command-line entry point.

Subcommands:
    run    execute a single-point config (sweep must be "none")
    sweep  execute the full sweep grid from the config
    trace  like sweep, but always writes per-run convergence traces

Common flags: --config PATH, --seed N, --out DIR, --algorithms LIST,
--parallel N. All experiment state lives in the config file; flags only
override it.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .harness import ExperimentSpec, load_config, run_experiment, write_outputs
from .scenario import ConfigurationError


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="TOML experiment config")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    parser.add_argument("--out", default="results",
                        help="output directory (default: ./results)")
    parser.add_argument("--algorithms", default=None,
                        help="comma-separated subset, e.g. agwwo,cmt")
    parser.add_argument("--parallel", type=int, default=1,
                        help="worker processes for independent cells")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udmec",
        description="Secure data-compressed multi-step offloading experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (("run", "run a single-point config"),
                       ("sweep", "run the configured sweep grid"),
                       ("trace", "run and export convergence traces")):
        _add_common(sub.add_parser(name, help=desc))
    return parser


def _effective_spec(args) -> ExperimentSpec:
    spec = load_config(args.config)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.algorithms:
        spec = replace(spec, algorithms=tuple(a.strip() for a in
                                              args.algorithms.split(",") if a.strip()))
    if args.command == "run" and spec.sweep_var != "none":
        raise ConfigurationError(
            "config defines a sweep; use the `sweep` subcommand (or set sweep = \"none\")")
    if args.command == "trace":
        spec = replace(spec, emit_traces=True)
    spec.validate()
    return spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _effective_spec(args)
        results = run_experiment(spec, parallel=args.parallel)
        path = write_outputs(spec, results, args.out)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(results)} rows to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
