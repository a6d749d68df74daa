"""Accelerated (sub)gradient schemes driven by estimation sequences.

Four iteration schemes share one skeleton: a scaling sequence ``S_k`` grows
by step sizes ``s_{k+1}`` chosen so that ``s^2 * L = (1 + S*mu) * (S + s)``,
a running lower model of the scaled objective (the estimation sequence) is
minimized in closed form through the separable solver, and the model minimum
``phi_k*`` certifies progress: ``S_k * (h_k - eps/2) <= phi_k*`` at every
iteration, which yields the computable bound ``h_k - h* <= R/S_k + eps/2``
for any ``R`` dominating the squared start distance.

``asga1`` / ``asga3`` need the smoothness level ``nu`` and constant ``L_nu``
and pick their per-step curvature by solving a one-dimensional root problem;
``asga2`` / ``asga4`` are parameter-free and replace that with a nonmonotone
backtracking line search (two counted oracle calls per trial).  The
single-subproblem pair (1, 2) anchors the model at extrapolation points and
reports ``x_k``; the double-subproblem pair (3, 4) anchors it at the main
iterates, solves one extra short-horizon subproblem per step, and reports
``y_k``.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .problems import CompositeProblem, Oracle, OracleBudgetExceeded
from .separable import SeparableBoxL1Task, solve_separable


class LineSearchStallError(RuntimeError):
    """The backtracking inner cycle hit the trial cap without acceptance.

    Observed for very small accuracy targets, where the acceptance test's
    ``alpha * eps / 2`` slack drowns in floating-point cancellation.
    """


def next_step_size(S: float, mu: float, L: float) -> float:
    """Positive root ``s`` of ``s^2 * L = (1 + S*mu) * (S + s)``."""
    if L <= 0:
        raise ValueError("L must be positive")
    if S < 0 or mu < 0:
        raise ValueError("S and mu must be nonnegative")
    b = 1.0 + S * mu
    return (b + np.sqrt(b * b + 4.0 * L * S * b)) / (2.0 * L)


def solve_lhat(S, mu, nu, L_nu, eps, tol=1e-10, max_doublings=200, full_output=False):
    """Per-step curvature estimate for the parameter-dependent schemes.

    Solves ``zeta(t) = t - (b + sqrt(b^2 + 4*t*S*b))**e * Ltilde = 0`` with
    ``b = 1 + S*mu``, ``e = (1-nu)/(1+nu)`` and
    ``Ltilde = ((1-nu) / (2*b*eps*(1+nu)))**e * L_nu**(2/(1+nu))``,
    to ``|zeta(t)| <= tol * max(1, t)``.  ``zeta`` is negative at 0 and
    eventually positive, and crosses zero exactly once; the root is bracketed
    by doubling and then pinned by a safeguarded secant/bisection loop.

    At ``nu = 1`` the exponent vanishes and ``L_nu`` is returned exactly,
    with zero iterations.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L_nu <= 0:
        raise ValueError("L_nu must be positive")
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    if S < 0 or mu < 0:
        raise ValueError("S and mu must be nonnegative")

    if nu == 1.0:
        root, info = float(L_nu), {"iterations": 0, "evaluations": 0, "ltilde": float(L_nu)}
        return (root, info) if full_output else root

    b = 1.0 + S * mu
    expo = (1.0 - nu) / (1.0 + nu)
    ltilde = ((1.0 - nu) / (2.0 * b * eps * (1.0 + nu))) ** expo * L_nu ** (2.0 / (1.0 + nu))

    def zeta(t):
        return t - (b + np.sqrt(b * b + 4.0 * t * S * b)) ** expo * ltilde

    lo, flo = 0.0, zeta(0.0)
    hi = (2.0 * b) ** expo * ltilde  # = -zeta(0): natural scale of the root
    fhi = zeta(hi)
    evals = 2
    doublings = 0
    while fhi <= 0.0:
        doublings += 1
        if doublings > max_doublings:
            raise ArithmeticError("curvature root bracketing failed (pathological inputs)")
        hi *= 2.0
        fhi = zeta(hi)
        evals += 1

    iterations = 0
    for it in range(500):
        iterations += 1
        width = hi - lo
        if fhi != flo:
            t = (lo * fhi - hi * flo) / (fhi - flo)  # secant through the bracket ends
        else:
            t = lo + 0.5 * width
        # keep strictly interior, and bisect periodically so the bracket shrinks
        if not (lo + 1e-3 * width <= t <= hi - 1e-3 * width) or it % 3 == 2:
            t = lo + 0.5 * width
        ft = zeta(t)
        evals += 1
        if abs(ft) <= tol * max(1.0, t):
            info = {"iterations": iterations, "evaluations": evals, "ltilde": ltilde}
            return (t, info) if full_output else t
        if ft < 0.0:
            lo, flo = t, ft
        else:
            hi, fhi = t, ft
    raise ArithmeticError("curvature root refinement did not converge")


@dataclass(frozen=True)
class ScalingState:
    """One step of the scaling sequence: ``S`` before the step, the chosen
    ``s_next``, the convex weight ``alpha = s_next / (S + s_next)`` and the
    curvature ``L_hat`` that produced it."""

    S: float
    s_next: float
    alpha: float
    L_hat: float

    @classmethod
    def make(cls, S, mu, L):
        s = next_step_size(S, mu, L)
        return cls(S=S, s_next=s, alpha=s / (S + s), L_hat=L)

    @property
    def S_next(self):
        return self.S + self.s_next


@dataclass(frozen=True)
class Certificate:
    """User-supplied radius bound ``R >= 0.5 * ||x* - x0||^2`` plus the accuracy target."""

    radius: float
    eps: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


def certificate_bound(cert: Certificate, S: float) -> float:
    """Guaranteed optimality-gap bound ``R/S + eps/2``, valid once the model
    inequality holds and ``R`` dominates the squared start distance."""
    if S <= 0:
        raise ValueError("S must be positive")
    return cert.radius / S + 0.5 * cert.eps


@dataclass(frozen=True)
class EstimationState:
    """Accumulated coefficients of the running lower model.

    The model is ``phi(x) = 0.5*||x - x0||^2 + <lin, x> + 0.5*quad*||x||^2
    + const + psi_scale * psi(x)``; each update folds one linearization
    (plus its strong-convexity quadratic) into these coefficients, so the
    model minimum stays cheaply computable for the certificate.
    """

    x0: np.ndarray
    lin: np.ndarray
    quad: float = 0.0
    const: float = 0.0
    psi_scale: float = 0.0

    @classmethod
    def initial(cls, x0):
        x0 = np.asarray(x0, dtype=float)
        return cls(x0=x0, lin=np.zeros_like(x0))

    def with_term(self, s, point, fval, grad, mu_f):
        """Model after adding ``s * [f(p) + <g, x - p> + mu_f/2 ||x - p||^2 + psi(x)]``."""
        return replace(
            self,
            lin=self.lin + s * (grad - mu_f * point),
            quad=self.quad + s * mu_f,
            const=self.const + s * (fval - grad @ point + 0.5 * mu_f * (point @ point)),
            psi_scale=self.psi_scale + s,
        )

    def value(self, x, problem: CompositeProblem) -> float:
        d = x - self.x0
        return float(
            0.5 * d @ d
            + self.lin @ x
            + 0.5 * self.quad * (x @ x)
            + self.const
            + self.psi_scale * problem.psi(x)
        )

    def minimize(self, problem: CompositeProblem):
        """Model minimizer over the domain and the model value there."""
        task = SeparableBoxL1Task(
            center=self.x0,
            linear=self.lin,
            quad_weight=self.quad,
            l1_weight=self.psi_scale * np.asarray(problem.simple_part.l1_weight()),
            bounds=problem.domain,
        )
        z = solve_separable(task)
        return z, self.value(z, problem)


@dataclass
class SolverConfig:
    """Run parameters shared by all solvers; each reads what it needs.

    ``mu`` overrides the strong convexity passed to the accelerated schemes
    (default: the problem's ``mu_f + mu_p``).  ``radius`` enables the
    computable gap certificate and its stop rule.  ``L0``, ``gamma1``,
    ``gamma2`` and ``trial_cap`` drive the backtracking schemes; ``lipschitz``
    and ``alpha0`` drive the baselines.  At least one stop source among
    ``budget_seconds``, ``budget_oracle``, ``max_iters`` and ``radius`` must
    be set.
    """

    eps: float = 1e-3
    x0: Optional[np.ndarray] = None
    mu: Optional[float] = None
    radius: Optional[float] = None
    L0: float = 1.0
    gamma1: float = 4.0
    gamma2: float = 0.9
    trial_cap: int = 60
    lipschitz: Optional[float] = None
    alpha0: float = 0.1
    fold_box: bool = False
    budget_seconds: Optional[float] = None
    budget_oracle: Optional[int] = None
    max_iters: Optional[int] = None

    def validate(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.L0 <= 0:
            raise ValueError("L0 must be positive")
        if not self.gamma1 > 1:
            raise ValueError("gamma1 must exceed 1")
        if not 0 < self.gamma2 < 1:
            raise ValueError("gamma2 must lie in (0, 1)")
        if (
            self.budget_seconds is None
            and self.budget_oracle is None
            and self.max_iters is None
            and self.radius is None
        ):
            raise ValueError("configuration needs a stop rule (time, oracle, iteration or certificate)")


@dataclass
class RunRecord:
    """One outer iteration's telemetry."""

    solver: str
    problem: str
    k: int
    wall_s: float
    h: float
    N_f: int
    S: Optional[float] = None
    cert_bound: Optional[float] = None


@dataclass
class RunTrace:
    """Everything a solver run produced: per-iteration records plus the outcome."""

    solver: str
    problem: str
    records: list = field(default_factory=list)
    x: Optional[np.ndarray] = None
    stop_reason: str = ""
    history: dict = field(default_factory=dict)
    params: str = ""

    @property
    def best_h(self) -> float:
        if self.records:
            return min(r.h for r in self.records)
        return self.history.get("h0", np.inf)

    @property
    def final_oracle_count(self) -> int:
        return self.history.get("oracle_count", self.records[-1].N_f if self.records else 0)


def _start_point(problem: CompositeProblem, cfg: SolverConfig):
    if cfg.x0 is not None:
        x0 = problem.check_point(cfg.x0)
        if not problem.domain.contains(x0):
            raise ValueError("x0 must lie in the domain")
        return x0
    return problem.domain.clip(np.zeros(problem.dim))


class _EstimationSolver:
    """State shared by the four accelerated schemes."""

    name = ""

    def __init__(self, problem: CompositeProblem, oracle: Oracle, cfg: SolverConfig):
        self.problem = problem
        self.oracle = oracle
        self.cfg = cfg
        self.mu = problem.mu if cfg.mu is None else cfg.mu
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        self.x0 = _start_point(problem, cfg)
        self.est = EstimationState.initial(self.x0)
        self.S = 0.0
        self.k = 0
        self.phi_star = 0.0
        self.L = cfg.L0
        self.history = {"s": [], "alpha": [], "L": [], "phi_star": [], "trials": []}

    def _require_smoothness(self):
        if self.problem.smoothness is None:
            raise ValueError(f"{self.name} needs the problem's (nu, L_nu) smoothness descriptor")
        return self.problem.smoothness

    def _record(self, scaling: ScalingState, phi_star: float, trials: int):
        self.history["s"].append(scaling.s_next)
        self.history["alpha"].append(scaling.alpha)
        self.history["L"].append(scaling.L_hat)
        self.history["phi_star"].append(phi_star)
        self.history["trials"].append(trials)

    def _short_task(self, center, s, point, grad):
        """Single-term subproblem anchored at ``point`` with prox center ``center``.

        The prox term carries the accumulated strong-convexity weight
        ``1 + S*mu`` (the model's modulus at the current scale), not just the
        unit weight: with anything less the certificate inequality fails for
        strongly convex problems.  At ``mu = 0`` this is the plain
        single-term prox problem.
        """
        mu_f = self.problem.mu_f
        acc = self.S * self.mu
        return SeparableBoxL1Task(
            center=center,
            linear=s * (grad - mu_f * point) - acc * center,
            quad_weight=acc + s * mu_f,
            l1_weight=s * np.asarray(self.problem.simple_part.l1_weight()),
            bounds=self.problem.domain,
        )


class Asga1(_EstimationSolver):
    """Parameter-dependent scheme with one subproblem per iteration (one oracle call)."""

    name = "asga1"

    def __init__(self, problem, oracle, cfg):
        super().__init__(problem, oracle, cfg)
        self.x = self.x0.copy()
        self.z = self.x0.copy()

    def report_point(self):
        return self.x

    def step(self):
        sm = self._require_smoothness()
        lhat = solve_lhat(self.S, self.mu, sm.nu, sm.L, self.cfg.eps)
        sc = ScalingState.make(self.S, self.mu, lhat)
        y = sc.alpha * self.z + (1.0 - sc.alpha) * self.x
        fy, gy = self.oracle.pair(y)
        est = self.est.with_term(sc.s_next, y, fy, gy, self.problem.mu_f)
        z, phi_star = est.minimize(self.problem)
        x = (1.0 - sc.alpha) * self.x + sc.alpha * z

        self.est, self.z, self.x = est, z, x
        self.S, self.phi_star = sc.S_next, phi_star
        self.k += 1
        self._record(sc, phi_star, 1)


class Asga2(_EstimationSolver):
    """Parameter-free variant of :class:`Asga1`: a nonmonotone backtracking
    line search replaces the curvature root solve (two calls per trial)."""

    name = "asga2"

    def __init__(self, problem, oracle, cfg):
        super().__init__(problem, oracle, cfg)
        self.x = self.x0.copy()
        self.z = self.x0.copy()

    def report_point(self):
        return self.x

    def step(self):
        cfg = self.cfg
        mu_f = self.problem.mu_f
        for p in range(cfg.trial_cap):
            lbar = cfg.gamma1 ** p * self.L
            sc = ScalingState.make(self.S, self.mu, lbar)
            y = sc.alpha * self.z + (1.0 - sc.alpha) * self.x
            fy, gy = self.oracle.pair(y)
            est = self.est.with_term(sc.s_next, y, fy, gy, mu_f)
            z, phi_star = est.minimize(self.problem)
            x = sc.alpha * z + (1.0 - sc.alpha) * self.x
            fx = self.oracle.value_f(x)
            d = x - y
            if fx <= fy + gy @ d + 0.5 * lbar * (d @ d) + 0.5 * sc.alpha * cfg.eps:
                self.est, self.z, self.x = est, z, x
                self.S, self.phi_star = sc.S_next, phi_star
                self.L = cfg.gamma2 * lbar
                self.k += 1
                self._record(sc, phi_star, p + 1)
                return
        raise LineSearchStallError(
            f"{self.name}: no acceptable curvature within {cfg.trial_cap} trials "
            f"(eps={cfg.eps:g} may be too small for this problem's scale)"
        )


class Asga3(_EstimationSolver):
    """Parameter-dependent scheme with two subproblems per iteration.

    Both the short-horizon subproblem and the accumulated-model update
    consume the oracle at the new anchor, so each iteration is counted as
    two calls.
    """

    name = "asga3"

    def __init__(self, problem, oracle, cfg):
        super().__init__(problem, oracle, cfg)
        self.y = self.x0.copy()
        self.v = self.x0.copy()

    def report_point(self):
        return self.y

    def step(self):
        sm = self._require_smoothness()
        lhat = solve_lhat(self.S, self.mu, sm.nu, sm.L, self.cfg.eps)
        sc = ScalingState.make(self.S, self.mu, lhat)
        x = sc.alpha * self.v + (1.0 - sc.alpha) * self.y

        fx, gx = self.oracle.pair(x)
        u = solve_separable(self._short_task(self.v, sc.s_next, x, gx))
        y = sc.alpha * u + (1.0 - sc.alpha) * self.y

        fx, gx = self.oracle.pair(x)  # the accumulated model pays for its own call
        est = self.est.with_term(sc.s_next, x, fx, gx, self.problem.mu_f)
        v, phi_star = est.minimize(self.problem)

        self.est, self.y, self.v = est, y, v
        self.S, self.phi_star = sc.S_next, phi_star
        self.k += 1
        self._record(sc, phi_star, 1)


class Asga4(_EstimationSolver):
    """Parameter-free variant of :class:`Asga3` (line search over the
    short-horizon step; the accepted trial's oracle pair is reused for the
    accumulated model)."""

    name = "asga4"

    def __init__(self, problem, oracle, cfg):
        super().__init__(problem, oracle, cfg)
        self.y = self.x0.copy()
        self.v = self.x0.copy()

    def report_point(self):
        return self.y

    def step(self):
        cfg = self.cfg
        for p in range(cfg.trial_cap):
            lbar = cfg.gamma1 ** p * self.L
            sc = ScalingState.make(self.S, self.mu, lbar)
            x = sc.alpha * self.v + (1.0 - sc.alpha) * self.y
            fx, gx = self.oracle.pair(x)
            u = solve_separable(self._short_task(self.v, sc.s_next, x, gx))
            y = sc.alpha * u + (1.0 - sc.alpha) * self.y
            fy = self.oracle.value_f(y)
            d = y - x
            if fy <= fx + gx @ d + 0.5 * lbar * (d @ d) + 0.5 * sc.alpha * cfg.eps:
                est = self.est.with_term(sc.s_next, x, fx, gx, self.problem.mu_f)
                v, phi_star = est.minimize(self.problem)
                self.est, self.y, self.v = est, y, v
                self.S, self.phi_star = sc.S_next, phi_star
                self.L = cfg.gamma2 * lbar
                self.k += 1
                self._record(sc, phi_star, p + 1)
                return
        raise LineSearchStallError(
            f"{self.name}: no acceptable curvature within {cfg.trial_cap} trials "
            f"(eps={cfg.eps:g} may be too small for this problem's scale)"
        )


SOLVER_REGISTRY = {
    "asga1": Asga1,
    "asga2": Asga2,
    "asga3": Asga3,
    "asga4": Asga4,
}


def make_solver(problem: CompositeProblem, method: str, oracle: Oracle, cfg: SolverConfig):
    from . import baselines  # noqa: F401  (fills the registry)

    try:
        factory = SOLVER_REGISTRY[method]
    except KeyError:
        known = ", ".join(sorted(SOLVER_REGISTRY))
        raise ValueError(f"unknown solver {method!r} (known: {known})") from None
    return factory(problem, oracle, cfg)


def run_solver(problem: CompositeProblem, method: str, config: SolverConfig) -> RunTrace:
    """Drive one solver until the first satisfied stop rule; one record per iteration.

    Telemetry objective values are computed outside the counting oracle, so
    reported call counts are exactly the algorithmic ones.  On a line-search
    stall the partial trace is attached to the raised error.
    """
    config.validate()
    oracle = Oracle(problem, budget=config.budget_oracle)
    solver = make_solver(problem, method, oracle, config)
    cert = Certificate(config.radius, config.eps) if config.radius is not None else None

    # On strongly convex problems the scaling sequence grows geometrically;
    # past this point the certificate term R/S is far below float resolution
    # and the next step-size computation would overflow.
    scaling_cap = 1e120

    trace = RunTrace(solver=method, problem=problem.name)
    trace.history = solver.history
    solver.history["h0"] = problem.h(solver.report_point())

    t0 = time.perf_counter()
    while True:
        if config.max_iters is not None and solver.k >= config.max_iters:
            trace.stop_reason = "max_iters"
            break
        if config.budget_seconds is not None and time.perf_counter() - t0 >= config.budget_seconds:
            trace.stop_reason = "budget_seconds"
            break
        if config.budget_oracle is not None and oracle.count >= config.budget_oracle:
            trace.stop_reason = "budget_oracle"
            break
        if getattr(solver, "S", 0.0) > scaling_cap:
            trace.stop_reason = "scaling_saturated"
            break
        try:
            solver.step()
        except OracleBudgetExceeded:
            trace.stop_reason = "budget_oracle"
            break
        except LineSearchStallError as exc:
            exc.trace = trace
            trace.stop_reason = "line_search_stall"
            raise

        S = getattr(solver, "S", None)
        bound = None
        if cert is not None and S is not None and S > 0:
            bound = certificate_bound(cert, S)
        trace.records.append(
            RunRecord(
                solver=method,
                problem=problem.name,
                k=solver.k,
                wall_s=time.perf_counter() - t0,
                h=problem.h(solver.report_point()),
                N_f=oracle.count,
                S=S,
                cert_bound=bound,
            )
        )
        if bound is not None and cert.radius / S <= 0.5 * cert.eps:
            trace.stop_reason = "certificate"
            break

    trace.x = np.array(solver.report_point(), copy=True)
    solver.history["oracle_count"] = oracle.count
    return trace
