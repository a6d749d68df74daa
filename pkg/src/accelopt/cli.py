"""Command-line experiment runner.

Reads an experiment description from a JSON config file (flags override its
fields), runs every (problem, solver) cell under the budget, and writes
traces, convergence curves, a summary table and rendered convergence figures
into the output directory.  Exit code 0 on full success, 2 if any cell
failed (failures are listed in ``errors.json``).
"""

import argparse
import json
import sys

from .bench import ExperimentConfig, emit_outputs, run_experiment, write_error_manifest


def build_parser():
    parser = argparse.ArgumentParser(
        prog="accelopt",
        description="Run accelerated-method benchmark experiments from a JSON config.",
    )
    parser.add_argument("--config", help="JSON file with the experiment configuration")
    parser.add_argument("--solver", help="comma-separated solver list (overrides config)")
    parser.add_argument(
        "--problem",
        help="problem family to run with defaults: l1, elastic_net, elastic_net_box, svm",
    )
    parser.add_argument("--budget-seconds", type=float, help="wall-clock budget per cell")
    parser.add_argument("--budget-oracle", type=int, help="oracle-call budget per cell")
    parser.add_argument("--eps", type=float, help="accuracy parameter")
    parser.add_argument("--seed", type=int, help="generator seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), help="trace/summary format")
    parser.add_argument(
        "--no-figures", action="store_true", help="skip rendering convergence figures"
    )
    return parser


DEFAULT_GRIDS = {
    "l1": {"family": "l1", "n": 200, "lambda": [1e-1, 1e-3]},
    "elastic_net": {"family": "elastic_net", "n": 200, "lambda1": [1e-3], "lambda2": [1e-2, 1e-3]},
    "elastic_net_box": {
        "family": "elastic_net_box",
        "n": 200,
        "lambda1": [1e-3],
        "lambda2": [1e-2, 1e-3],
    },
    "svm": {"family": "svm", "m": 50, "n": 200, "lambda": [1e-1]},
}


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    if args.problem:
        data["problem"] = DEFAULT_GRIDS.get(args.problem, {"family": args.problem})
    if "problem" not in data:
        raise ValueError("either --config or --problem is required")
    if args.solver:
        data["solvers"] = [s.strip() for s in args.solver.split(",") if s.strip()]
    for key in ("budget_seconds", "budget_oracle", "eps", "seed", "out", "format"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    traces, errors = run_experiment(config)
    if traces:
        manifest = emit_outputs(traces, config.out, config.format)
        if not args.no_figures:
            from .figures import render_convergence

            manifest += render_convergence(traces, config.out)
        for path in manifest:
            print(path)
    if errors:
        path = write_error_manifest(errors, config.out)
        print(f"{len(errors)} cell(s) failed; see {path}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
