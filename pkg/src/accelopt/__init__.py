"""Accelerated first-order methods for composite convex minimization."""

from .problems import (
    CompositeProblem,
    Domain,
    EuclideanProx,
    NumericOverflowError,
    Oracle,
    SimplePart,
    Smoothness,
    bregman,
    holder_majorant,
)
from .separable import (
    SeparableBoxL1Task,
    brute_force_min,
    brute_force_separable,
    kkt_residual,
    project_box,
    soft_threshold,
    solve_separable,
)
from .solvers import (
    Certificate,
    EstimationState,
    LineSearchStallError,
    RunRecord,
    RunTrace,
    ScalingState,
    SolverConfig,
    certificate_bound,
    next_step_size,
    run_solver,
    solve_lhat,
)
from .baselines import FistaState, fista_iterate, nesun_preset, nsdsg_iterate, pga_iterate
from . import zoo

__all__ = [
    "CompositeProblem",
    "Domain",
    "EuclideanProx",
    "NumericOverflowError",
    "Oracle",
    "SimplePart",
    "Smoothness",
    "bregman",
    "holder_majorant",
    "SeparableBoxL1Task",
    "brute_force_min",
    "brute_force_separable",
    "kkt_residual",
    "project_box",
    "soft_threshold",
    "solve_separable",
    "Certificate",
    "EstimationState",
    "LineSearchStallError",
    "RunRecord",
    "RunTrace",
    "ScalingState",
    "SolverConfig",
    "certificate_bound",
    "next_step_size",
    "run_solver",
    "solve_lhat",
    "FistaState",
    "fista_iterate",
    "nesun_preset",
    "nsdsg_iterate",
    "pga_iterate",
    "zoo",
]
