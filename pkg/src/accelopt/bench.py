"""Configuration-driven experiment runner with persisted traces and summaries.

One experiment is a grid of problem points (a family plus regularization
parameters) raced by a list of solvers under a shared budget.  Each
(problem-point, solver) cell yields one trace; outputs are a per-cell trace
file, a per-cell two-column convergence curve, and one summary row per cell
(best objective value and final oracle count).  With an oracle-call budget
the whole run is deterministic given the seed.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .problems import CompositeProblem
from .solvers import RunTrace, SolverConfig, run_solver
from . import zoo

TRACE_COLUMNS = ("solver", "problem", "params", "k", "wall_s", "h", "N_f", "S", "cert_bound")
SUMMARY_COLUMNS = ("solver", "problem", "params", "f_b", "N_f")

DEFAULT_SOLVERS = ("nsdsg", "pga", "fista", "nesun", "asga1", "asga2", "asga3", "asga4")

# Diminishing-step starting sizes proven workable per family.
NSDSG_ALPHA0 = {"least_squares": 1e-1, "svm": 5e-11}
# Backtracking factors per family and solver.
LINE_SEARCH_GAMMAS = {
    ("least_squares", "asga2"): (4.0, 0.9),
    ("least_squares", "asga4"): (4.0, 0.9),
    ("svm", "asga2"): (4.0, 0.9),
    ("svm", "asga4"): (4.0, 0.6),
}


@dataclass
class ExperimentConfig:
    """A problem grid, a solver list, and the run budget."""

    problem: dict
    solvers: list = field(default_factory=lambda: list(DEFAULT_SOLVERS))
    eps: float = 1e-3
    budget_seconds: float = None
    budget_oracle: int = None
    max_iters: int = None
    seed: int = 0
    out: str = "results"
    format: str = "csv"

    def validate(self):
        if not self.problem or "family" not in self.problem:
            raise ValueError("experiment needs a problem family")
        if not self.solvers:
            raise ValueError("experiment needs at least one solver")
        if self.budget_seconds is None and self.budget_oracle is None and self.max_iters is None:
            raise ValueError("experiment needs a budget (seconds, oracle calls or iterations)")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    @classmethod
    def from_dict(cls, data: dict):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment config fields: {sorted(unknown)}")
        return cls(**data)


def _format_params(params: dict) -> str:
    return ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())


def expand_problem_grid(spec: dict, seed: int):
    """Materialize the grid: a list of (problem, params-string, family-kind) cells."""
    family = spec["family"]
    cells = []

    def grid(key, default=None):
        vals = spec.get(key, default)
        if vals is None:
            raise ValueError(f"problem family {family!r} needs {key!r}")
        return vals if isinstance(vals, (list, tuple)) else [vals]

    if family == "l1":
        n = int(spec.get("n", 500))
        m = spec.get("m")
        bundle = zoo.gen_inverse_laplace(n, seed=seed, m=m)
        for lam in grid("lambda"):
            problem = zoo.build_l1_least_squares(bundle, lam)
            cells.append((problem, _format_params({"lambda": float(lam)}), "least_squares"))
    elif family in ("elastic_net", "elastic_net_box"):
        n = int(spec.get("n", 500))
        m = spec.get("m")
        bundle = zoo.gen_inverse_laplace(n, seed=seed, m=m)
        box = zoo.unit_box(n) if family == "elastic_net_box" else None
        for lam1 in grid("lambda1"):
            for lam2 in grid("lambda2"):
                problem = zoo.build_elastic_net(bundle, lam1, lam2, box=box)
                params = _format_params({"lambda1": float(lam1), "lambda2": float(lam2)})
                cells.append((problem, params, "least_squares"))
    elif family == "svm":
        if "csv" in spec:
            data = zoo.load_labeled_csv(spec["csv"])
        else:
            data = zoo.gen_svm_data(int(spec.get("m", 50)), int(spec.get("n", 200)), seed=seed)
        regs = grid("reg", list(zoo.SVM_REGULARIZERS))
        for reg in regs:
            for lam in grid("lambda"):
                problem = zoo.build_svm(data, lam, reg)
                cells.append((problem, _format_params({"lambda": float(lam)}), "svm"))
    else:
        raise ValueError(f"unknown problem family {family!r}")
    return cells


def solver_config_for(solver: str, family_kind: str, config: ExperimentConfig) -> SolverConfig:
    cfg = SolverConfig(
        eps=config.eps,
        budget_seconds=config.budget_seconds,
        budget_oracle=config.budget_oracle,
        max_iters=config.max_iters,
        alpha0=NSDSG_ALPHA0.get(family_kind, 1e-1),
    )
    gammas = LINE_SEARCH_GAMMAS.get((family_kind, solver))
    if gammas is not None:
        cfg.gamma1, cfg.gamma2 = gammas
    return cfg


@dataclass
class CellError:
    solver: str
    problem: str
    params: str
    error: str


def run_experiment(config: ExperimentConfig):
    """Run every (problem-point, solver) cell; failures are collected, not fatal.

    Returns ``(traces, errors)``.
    """
    config.validate()
    cells = expand_problem_grid(config.problem, config.seed)
    traces, errors = [], []
    for problem, params, family_kind in cells:
        for solver in config.solvers:
            cfg = solver_config_for(solver, family_kind, config)
            try:
                trace = run_solver(problem, solver, cfg)
            except Exception as exc:  # noqa: BLE001 - cell isolation is the contract
                errors.append(CellError(solver, problem.name, params, f"{type(exc).__name__}: {exc}"))
                continue
            trace.params = params
            traces.append(trace)
    return traces, errors


def _cell_stem(trace: RunTrace) -> str:
    params = trace.params.replace("/", "_") or "default"
    return f"{trace.problem}__{params}__{trace.solver}"


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):  # covers numpy scalars, which subclass float
        return repr(float(value))
    return str(value)


def _trace_rows(trace: RunTrace):
    for rec in trace.records:
        yield {
            "solver": rec.solver,
            "problem": rec.problem,
            "params": trace.params,
            "k": rec.k,
            "wall_s": rec.wall_s,
            "h": rec.h,
            "N_f": rec.N_f,
            "S": rec.S,
            "cert_bound": rec.cert_bound,
        }


def _summary_row(trace: RunTrace):
    return {
        "solver": trace.solver,
        "problem": trace.problem,
        "params": trace.params,
        "f_b": trace.best_h,
        "N_f": trace.final_oracle_count,
    }


def _write_csv(path: Path, columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, rows):
    path.write_text(json.dumps(list(rows), indent=1, allow_nan=False) + "\n", encoding="utf-8")


class PartialWriteError(OSError):
    """Emission failed midway; ``manifest`` lists the files completed before the failure."""

    def __init__(self, message, manifest):
        super().__init__(message)
        self.manifest = manifest


def emit_outputs(traces, out_dir, format="csv"):
    """Write per-cell trace files, per-cell convergence curves, and the summary.

    Returns the list of written paths.  Refuses an empty trace set; an I/O
    failure raises :class:`PartialWriteError` carrying the manifest written
    so far.
    """
    if not traces:
        raise ValueError("no traces to emit")
    if format not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    out = Path(out_dir)
    manifest = []
    try:
        (out / "traces").mkdir(parents=True, exist_ok=True)
        (out / "curves").mkdir(parents=True, exist_ok=True)
        for trace in traces:
            stem = _cell_stem(trace)
            rows = list(_trace_rows(trace))
            if format == "csv":
                path = out / "traces" / f"{stem}.csv"
                _write_csv(path, TRACE_COLUMNS, rows)
            else:
                path = out / "traces" / f"{stem}.json"
                _write_json(path, rows)
            manifest.append(path)

            curve = out / "curves" / f"{stem}.csv"
            _write_csv(curve, ("k", "h", "N_f"), rows)
            manifest.append(curve)

        summary_rows = [_summary_row(t) for t in traces]
        if format == "csv":
            summary = out / "summary.csv"
            _write_csv(summary, SUMMARY_COLUMNS, summary_rows)
        else:
            summary = out / "summary.json"
            _write_json(summary, summary_rows)
        manifest.append(summary)
    except OSError as exc:
        raise PartialWriteError(str(exc), manifest) from exc
    return manifest


def write_error_manifest(errors, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "errors.json"
    payload = [
        {"solver": e.solver, "problem": e.problem, "params": e.params, "error": e.error}
        for e in errors
    ]
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    return path
