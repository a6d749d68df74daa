"""Closed-form solvers for the separable auxiliary problems, plus brute-force oracles.

Every auxiliary problem of the accelerated schemes reduces to one canonical
separable task: minimize

    0.5 * ||x - x0||^2 + <a, x> + (q / 2) * ||x||^2 + sum_j r_j * |x_j|

over a box (or the whole space).  The objective is ``(1 + q)``-strongly
convex, so the minimizer is unique and is obtained componentwise by a single
"shrink then clamp" rule.  The case-by-case sign analyses one would write
for pure projection, pure soft thresholding, or box-plus-l1 are all special
cases of that rule and are exercised by tests rather than coded as separate
branches.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .problems import Domain

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def project_box(y, d: Domain):
    """Orthogonal projection onto the domain: componentwise clamp (identity for the whole space)."""
    return d.clip(np.asarray(y, dtype=float))


def soft_threshold(y, r):
    """Componentwise shrink toward zero: ``sign(y) * max(|y| - r, 0)``.

    This is the unique minimizer of ``0.5 * ||x - y||^2 + sum_j r_j |x_j|``;
    ``r`` may be a scalar or a per-component vector of nonnegative weights.
    """
    y = np.asarray(y, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("threshold must be nonnegative")
    return np.sign(y) * np.maximum(np.abs(y) - r, 0.0)


@dataclass(frozen=True)
class SeparableBoxL1Task:
    """The canonical separable subproblem (see module docstring).

    ``quad_weight`` is the coefficient of ``0.5 * ||x||^2`` beyond the unit
    prox term, ``linear`` the coefficient vector of ``<a, x>``, ``l1_weight``
    a scalar or per-component nonnegative l1 weight, ``center`` the prox
    center ``x0``.
    """

    center: np.ndarray
    linear: np.ndarray
    quad_weight: float = 0.0
    l1_weight: Union[float, np.ndarray] = 0.0
    bounds: Domain = None

    def __post_init__(self):
        if self.quad_weight < 0:
            raise ValueError("quad_weight must be nonnegative")
        if np.any(np.asarray(self.l1_weight) < 0):
            raise ValueError("l1_weight must be nonnegative")
        if self.bounds is None:
            object.__setattr__(self, "bounds", Domain.whole_space())

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        d = x - self.center
        return float(
            0.5 * d @ d
            + self.linear @ x
            + 0.5 * self.quad_weight * x @ x
            + np.sum(self.l1_weight * np.abs(x))
        )


def solve_separable(task: SeparableBoxL1Task):
    """Unique minimizer of a :class:`SeparableBoxL1Task`, componentwise shrink-then-clamp.

    With ``m = center - linear``, each component is
    ``clip(sign(m_j) * max(|m_j| - r_j, 0) / (1 + q), lo_j, hi_j)``.
    Components with ``|m_j| <= r_j`` come out exactly zero before clamping,
    so the returned value is bit-exact zero whenever zero is feasible.
    """
    m = task.center - task.linear
    x = soft_threshold(m, task.l1_weight) / (1.0 + task.quad_weight)
    return task.bounds.clip(x)


def kkt_residual(task: SeparableBoxL1Task, x, slack=1e-10) -> float:
    """Worst componentwise violation of the task's optimality conditions at ``x``.

    The condition per component is interval membership:
    ``0 in (1+q) x_j - m_j + r_j * d|x_j| + N_[lo,hi](x_j)``, where the l1
    subdifferential at zero is ``[-r_j, r_j]`` and the normal cone relaxes
    the sign at active bounds.  Bound activity and the zero test use the
    given arithmetic ``slack``; the returned residual is 0.0 for an exact
    KKT point.
    """
    x = np.asarray(x, dtype=float)
    m = task.center - task.linear
    base = (1.0 + task.quad_weight) * x - m
    r = np.broadcast_to(np.asarray(task.l1_weight, dtype=float), x.shape)

    lo = task.bounds.lo if task.bounds.is_box() else np.full_like(x, -np.inf)
    hi = task.bounds.hi if task.bounds.is_box() else np.full_like(x, np.inf)

    worst = 0.0
    for j in range(x.size):
        g_lo, g_hi = base[j] - r[j], base[j] + r[j]
        if abs(x[j]) > slack:
            g_lo = g_hi = base[j] + np.sign(x[j]) * r[j]
        # active bounds open one side of the interval: the normal cone is
        # (-inf, 0] at the lower bound and [0, inf) at the upper bound
        if np.isfinite(lo[j]) and x[j] <= lo[j] + slack:
            g_lo = -np.inf
        if np.isfinite(hi[j]) and x[j] >= hi[j] - slack:
            g_hi = np.inf
        violation = max(g_lo, 0.0) + max(-g_hi, 0.0)
        worst = max(worst, violation)
    return worst


def _golden_section(fun: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Minimize a unimodal scalar function on [lo, hi] by golden-section search."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def brute_force_separable(task: SeparableBoxL1Task, resolution=1e-9):
    """Independent minimizer of a separable task: golden-section search per coordinate.

    Never uses the closed form; this is the verification oracle for
    :func:`solve_separable`.  Each coordinate objective is strongly convex
    (hence unimodal); the unconstrained minimizer magnitude is at most
    ``|m_j| / (1 + q)`` (directly from the optimality inclusion), which
    caps the search interval on infinite sides.  Objective values are
    evaluated in extended precision so the value flatness near the minimum
    does not limit the locating accuracy above ~1e-8.
    """
    m = task.center - task.linear
    r = np.broadcast_to(np.asarray(task.l1_weight, dtype=float), m.shape)
    lo = task.bounds.lo if task.bounds.is_box() else np.full_like(m, -np.inf)
    hi = task.bounds.hi if task.bounds.is_box() else np.full_like(m, np.inf)

    center = task.center.astype(np.longdouble)
    linear = task.linear.astype(np.longdouble)
    quad = np.longdouble(task.quad_weight)
    rl = r.astype(np.longdouble)

    out = np.empty_like(m)
    for j in range(m.size):
        reach = abs(m[j]) / (1.0 + task.quad_weight) + 1.0
        a = lo[j] if np.isfinite(lo[j]) else -reach
        b = hi[j] if np.isfinite(hi[j]) else reach
        if a > b:
            # an infinite-side cap fell short of the finite bound, so the
            # unconstrained minimizer lies beyond it: the bound is optimal
            a = b = hi[j] if np.isfinite(hi[j]) else lo[j]

        def fj(t, j=j):
            t = np.longdouble(t)
            d = t - center[j]
            return 0.5 * d * d + linear[j] * t + 0.5 * quad * t * t + rl[j] * abs(t)

        t = _golden_section(fj, a, b, resolution) if b > a else a
        # snap to the kink / bounds when they win on value
        candidates = [t]
        if a <= 0.0 <= b:
            candidates.append(0.0)
        if np.isfinite(lo[j]):
            candidates.append(lo[j])
        if np.isfinite(hi[j]):
            candidates.append(hi[j])
        out[j] = min(candidates, key=fj)
    return out


def brute_force_min(objective: Callable[[np.ndarray], float], d: Domain, resolution: float):
    """Grid minimizer of a scalar field over a finite box (dimension <= 3).

    Coarse-to-fine: a 21-point-per-axis grid is refined around the incumbent
    until the cell size drops below ``resolution``.  Adequate for strongly
    convex objectives only; separable objectives should use
    :func:`brute_force_separable`, which works in any dimension.
    """
    if not d.is_box() or not (np.all(np.isfinite(d.lo)) and np.all(np.isfinite(d.hi))):
        raise ValueError("grid brute force needs a finite box; use the separable oracle instead")
    lo = np.asarray(d.lo, dtype=float).copy()
    hi = np.asarray(d.hi, dtype=float).copy()
    ndim = lo.size
    if ndim > 3:
        raise ValueError("grid brute force supports dimension <= 3")

    pts_per_axis = 21
    while True:
        axes = [np.linspace(lo[i], hi[i], pts_per_axis) for i in range(ndim)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        vals = np.array([objective(p) for p in pts])
        best = pts[int(np.argmin(vals))]
        width = (hi - lo) / (pts_per_axis - 1)
        if np.all(width <= resolution):
            return best
        lo = np.maximum(np.asarray(d.lo, dtype=float), best - width)
        hi = np.minimum(np.asarray(d.hi, dtype=float), best + width)
