"""Reference first-order methods used for comparison runs.

NSDSG (diminishing-step projected subgradient), PGA (constant-step proximal
gradient), FISTA (momentum proximal gradient) and the NESUN preset (the
parameter-free double-subproblem scheme with strong convexity ignored and
halving/doubling line-search factors).  All share the oracle-counting
convention of :mod:`accelopt.problems`: one counted call per iteration for
the three classical methods.
"""

from dataclasses import dataclass, replace

import numpy as np

from .problems import CompositeProblem, Oracle
from .separable import SeparableBoxL1Task, solve_separable
from .solvers import SOLVER_REGISTRY, Asga4, SolverConfig, _start_point


def _forward_backward_task(problem: CompositeProblem, center, step):
    return SeparableBoxL1Task(
        center=center,
        linear=np.zeros(problem.dim),
        l1_weight=step * np.asarray(problem.simple_part.l1_weight()),
        bounds=problem.domain,
    )


def nsdsg_iterate(oracle: Oracle, x, k: int, alpha0: float):
    """One diminishing-step subgradient step, ``alpha0 / sqrt(k)``, mapped
    back to the feasible set through the simple part's prox."""
    if k < 1:
        raise ValueError("iteration index starts at 1")
    if alpha0 <= 0:
        raise ValueError("alpha0 must be positive")
    step = alpha0 / np.sqrt(k)
    _, g = oracle.pair(x)
    return solve_separable(_forward_backward_task(oracle.problem, x - step * g, step))


def _require_lipschitz(problem: CompositeProblem, cfg: SolverConfig, name: str) -> float:
    if cfg.lipschitz is not None:
        L = cfg.lipschitz
    elif problem.smoothness is not None and problem.smoothness.nu == 1.0:
        L = problem.smoothness.L
    else:
        raise ValueError(f"{name} needs a Lipschitz constant (smooth problems only)")
    if L <= 0:
        raise ValueError("Lipschitz constant must be positive")
    return L


def pga_iterate(oracle: Oracle, x, L: float):
    """One proximal gradient step with the fixed step ``1/L`` (monotone in ``h``)."""
    _, g = oracle.pair(x)
    return solve_separable(_forward_backward_task(oracle.problem, x - g / L, 1.0 / L))


@dataclass(frozen=True)
class FistaState:
    """Momentum recursion state: previous iterate, extrapolated point, ``t_k``."""

    x_prev: np.ndarray
    y: np.ndarray
    t: float


def fista_iterate(oracle: Oracle, state: FistaState, L: float):
    """One momentum prox-gradient step; returns the new state (its ``x_prev``
    is the fresh iterate) with ``t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2``."""
    _, g = oracle.pair(state.y)
    x = solve_separable(_forward_backward_task(oracle.problem, state.y - g / L, 1.0 / L))
    t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * state.t ** 2))
    y_next = x + ((state.t - 1.0) / t_next) * (x - state.x_prev)
    return FistaState(x_prev=x, y=y_next, t=t_next)


def _reject_unfoldable_box(problem: CompositeProblem, cfg: SolverConfig, name: str):
    # Box handling through the separable prox exists but stays opt-in; the
    # classical statements of these methods do not cover constrained runs.
    if problem.domain.is_box() and not cfg.fold_box:
        raise ValueError(
            f"{name} is not run on box-constrained problems by default; "
            "set fold_box=True to fold the box into the prox step"
        )


class Nsdsg:
    name = "nsdsg"

    def __init__(self, problem: CompositeProblem, oracle: Oracle, cfg: SolverConfig):
        if cfg.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        self.problem, self.oracle, self.cfg = problem, oracle, cfg
        self.x = _start_point(problem, cfg)
        self.k = 0
        self.history = {}

    def report_point(self):
        return self.x

    def step(self):
        self.x = nsdsg_iterate(self.oracle, self.x, self.k + 1, self.cfg.alpha0)
        self.k += 1


class Pga:
    name = "pga"

    def __init__(self, problem: CompositeProblem, oracle: Oracle, cfg: SolverConfig):
        self.L = _require_lipschitz(problem, cfg, "pga")
        _reject_unfoldable_box(problem, cfg, "pga")
        self.problem, self.oracle, self.cfg = problem, oracle, cfg
        self.x = _start_point(problem, cfg)
        self.k = 0
        self.history = {}

    def report_point(self):
        return self.x

    def step(self):
        self.x = pga_iterate(self.oracle, self.x, self.L)
        self.k += 1


class Fista:
    name = "fista"

    def __init__(self, problem: CompositeProblem, oracle: Oracle, cfg: SolverConfig):
        self.L = _require_lipschitz(problem, cfg, "fista")
        _reject_unfoldable_box(problem, cfg, "fista")
        self.problem, self.oracle, self.cfg = problem, oracle, cfg
        x0 = _start_point(problem, cfg)
        self.state = FistaState(x_prev=x0, y=x0, t=1.0)
        self.k = 0
        self.history = {"t": [1.0]}

    def report_point(self):
        return self.state.x_prev

    def step(self):
        self.state = fista_iterate(self.oracle, self.state, self.L)
        self.k += 1
        self.history["t"].append(self.state.t)


class Nesun(Asga4):
    """The parameter-free double-subproblem scheme in its classical preset:
    strong convexity ignored, doubling/halving line-search factors."""

    name = "nesun"
    preset = (0.0, 2.0, 0.5)  # (mu, gamma1, gamma2)

    def __init__(self, problem, oracle, cfg):
        mu, g1, g2 = self.preset
        super().__init__(problem, oracle, replace(cfg, mu=mu, gamma1=g1, gamma2=g2))


def nesun_preset():
    """Solver handle for the NESUN configuration of the double-subproblem scheme."""
    return Nesun


SOLVER_REGISTRY.update(
    {
        "nsdsg": Nsdsg,
        "pga": Pga,
        "fista": Fista,
        "nesun": Nesun,
    }
)
