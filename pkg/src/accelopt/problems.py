"""Composite problems ``h = f + psi`` over simple convex sets, and their first-order oracle.

A problem bundles a smooth-or-nonsmooth convex ``f`` (value + subgradient
callables), a prox-friendly simple part ``psi`` (zero or a weighted l1 norm),
and a domain ``C`` (the whole space or a box).  Solvers talk to the problem
through a counting :class:`Oracle` so that reported oracle-call numbers are
exact integers: one call is one (value, subgradient) pair at a point, and a
value-only evaluation inside a line search also costs one call.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np


class NumericOverflowError(ArithmeticError):
    """An oracle returned a non-finite value; the run is aborted."""


class DomainViolationError(ValueError):
    """A query point lies outside the problem domain."""


class OracleBudgetExceeded(Exception):
    """Internal signal: the next oracle call would exceed the call budget."""


class Domain:
    """Feasible set: either the whole space or a box ``[lo, hi]``.

    Box bounds may contain ``+-inf`` entries; infinite bounds short-circuit
    the clamp.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo=None, hi=None):
        if (lo is None) != (hi is None):
            raise ValueError("box needs both lo and hi")
        if lo is not None:
            lo = np.asarray(lo, dtype=float)
            hi = np.asarray(hi, dtype=float)
            if lo.shape != hi.shape:
                raise ValueError("box bounds must have equal shapes")
            if np.any(lo > hi):
                raise ValueError("box requires lo <= hi componentwise")
        self.lo = lo
        self.hi = hi

    @classmethod
    def whole_space(cls):
        return cls()

    @classmethod
    def box(cls, lo, hi):
        return cls(lo, hi)

    @property
    def kind(self):
        return "whole_space" if self.lo is None else "box"

    def is_box(self):
        return self.lo is not None

    def clip(self, y):
        """Componentwise clamp of ``y`` onto the set (identity for the whole space)."""
        if self.lo is None:
            return np.asarray(y, dtype=float)
        return np.clip(y, self.lo, self.hi)

    def contains(self, x, tol=1e-9):
        if self.lo is None:
            return True
        scale = 1.0 + np.maximum(np.abs(self.lo), np.abs(self.hi))
        slack = tol * np.where(np.isfinite(scale), scale, 1.0)
        above = np.all((x >= self.lo - slack) | ~np.isfinite(self.lo))
        below = np.all((x <= self.hi + slack) | ~np.isfinite(self.hi))
        return bool(above and below)

    def __repr__(self):
        if self.lo is None:
            return "Domain.whole_space()"
        return f"Domain.box(lo={self.lo!r}, hi={self.hi!r})"


@dataclass(frozen=True)
class SimplePart:
    """The simple part ``psi``: zero, or a (possibly componentwise) weighted l1 norm."""

    kind: str  # "zero" | "l1"
    weight: Union[float, np.ndarray] = 0.0

    @classmethod
    def zero(cls):
        return cls("zero", 0.0)

    @classmethod
    def l1(cls, weight):
        w = np.asarray(weight, dtype=float)
        if np.any(w < 0):
            raise ValueError("l1 weight must be nonnegative")
        return cls("l1", float(w) if w.ndim == 0 else w)

    def value(self, x) -> float:
        if self.kind == "zero":
            return 0.0
        return float(np.sum(self.weight * np.abs(x)))

    def l1_weight(self):
        """Weight usable as the l1 coefficient of a separable subproblem (0 for zero kind)."""
        return self.weight if self.kind == "l1" else 0.0


@dataclass(frozen=True)
class Smoothness:
    """Level of smoothness ``nu`` in [0, 1] and the matching Holder constant."""

    nu: float
    L: float

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError("nu must lie in [0, 1]")
        if self.L <= 0:
            raise ValueError("Holder constant must be positive")


@dataclass(frozen=True)
class CompositeProblem:
    """Minimize ``h(x) = f(x) + psi(x)`` over ``x in C``.

    ``f`` and ``grad_f`` are the value and subgradient callables of the
    smooth-or-nonsmooth part (for smooth instances ``grad_f`` is the
    gradient).  ``mu_f``/``mu_p`` are the strong-convexity moduli of ``f``
    and ``psi``; ``smoothness`` is optional and required only by the
    parameter-dependent solvers.
    """

    dim: int
    f: Callable[[np.ndarray], float]
    grad_f: Callable[[np.ndarray], np.ndarray]
    simple_part: SimplePart = field(default_factory=SimplePart.zero)
    domain: Domain = field(default_factory=Domain.whole_space)
    mu_f: float = 0.0
    mu_p: float = 0.0
    smoothness: Optional[Smoothness] = None
    name: str = ""

    def __post_init__(self):
        if self.mu_f < 0 or self.mu_p < 0:
            raise ValueError("strong-convexity moduli must be nonnegative")

    @property
    def mu(self) -> float:
        return self.mu_f + self.mu_p

    def psi(self, x) -> float:
        return self.simple_part.value(x)

    def h(self, x) -> float:
        """Uncounted objective evaluation (telemetry and tests only)."""
        return float(self.f(x)) + self.psi(x)

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of dimension {self.dim}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("query point must be finite")
        return x


class Oracle:
    """Counting first-order oracle for one solver run.

    The wrapped problem is immutable and shareable; the counter lives here so
    concurrent runs never race on it.  ``budget`` (optional) caps the number
    of calls: a call that would exceed it raises :class:`OracleBudgetExceeded`
    before doing any work, so the final count never passes the budget.
    """

    def __init__(self, problem: CompositeProblem, budget: Optional[int] = None):
        self.problem = problem
        self.budget = budget
        self.count = 0

    def _charge(self):
        if self.budget is not None and self.count + 1 > self.budget:
            raise OracleBudgetExceeded(self.count)
        self.count += 1

    def _finite(self, value):
        if not np.all(np.isfinite(value)):
            raise NumericOverflowError(
                f"oracle produced a non-finite output after {self.count} calls"
            )
        return value

    def value_f(self, x) -> float:
        """One counted call: the value of ``f`` alone (line-search tests use this)."""
        x = self.problem.check_point(x)
        self._charge()
        return float(self._finite(self.problem.f(x)))

    def eval_h(self, x) -> float:
        """One counted call: ``f(x) + psi(x)`` (the simple part is free)."""
        return self.value_f(x) + self.problem.psi(x)

    def pair(self, x):
        """One counted call: the (value, subgradient) pair of ``f`` at ``x``."""
        x = self.problem.check_point(x)
        if not self.problem.domain.contains(x):
            raise DomainViolationError("subgradient query outside the domain")
        self._charge()
        fx = float(self._finite(self.problem.f(x)))
        gx = np.asarray(self.problem.grad_f(x), dtype=float)
        self._finite(gx)
        return fx, gx


@dataclass(frozen=True)
class EuclideanProx:
    """Euclidean prox-function ``0.5 * ||x - center||^2`` and its distance.

    The induced distance ``0.5 * ||x - y||^2`` meets the 1-strong-convexity
    lower bound with equality, which is the only geometry instantiated here.
    """

    center: np.ndarray

    def distance(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("dimension mismatch in prox distance")
        d = x - y
        return 0.5 * float(d @ d)


def bregman(model: EuclideanProx, x, y) -> float:
    """Distance generated by the prox-function; ``0.5 * ||x - y||^2`` for the Euclidean model."""
    return model.distance(x, y)


def holder_majorant(nu: float, L_nu: float, delta: float) -> float:
    """Smallest quadratic-majorant coefficient for a ``(nu, L_nu)``-smooth function.

    Returns ``((1 - nu) / (delta * (1 + nu))) ** ((1 - nu) / (1 + nu))
    * L_nu ** (2 / (1 + nu))``: with this coefficient the usual Lipschitz
    descent inequality holds up to an additive slack ``delta / 2``.  At
    ``nu = 1`` the first factor is taken as 1 (``0**0 := 1``) and the exact
    Lipschitz constant is returned.
    """
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    if L_nu <= 0:
        raise ValueError("L_nu must be positive")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if nu == 1.0:
        return float(L_nu)
    expo = (1.0 - nu) / (1.0 + nu)
    return float(((1.0 - nu) / (delta * (1.0 + nu))) ** expo * L_nu ** (2.0 / (1.0 + nu)))
