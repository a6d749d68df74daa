import math

import numpy as np
import pytest

from accelopt import (
    CompositeProblem,
    Domain,
    EuclideanProx,
    NumericOverflowError,
    Oracle,
    SimplePart,
    bregman,
    holder_majorant,
)
from accelopt.problems import DomainViolationError, OracleBudgetExceeded
from accelopt import zoo


def make_quadratic(b, lam=None):
    b = np.asarray(b, dtype=float)
    n = b.size
    simple = SimplePart.l1(lam) if lam is not None else SimplePart.zero()
    return CompositeProblem(
        dim=n,
        f=lambda x: 0.5 * float((x - b) @ (x - b)),
        grad_f=lambda x: x - b,
        simple_part=simple,
    )


class TestEvalH:
    def test_centered_quadratic_minimum(self):
        prob = make_quadratic(np.zeros(3))
        assert Oracle(prob).eval_h(np.zeros(3)) == 0.0

    def test_l1_composite_value(self):
        prob = make_quadratic([2.0, 0.0], lam=1.0)
        assert Oracle(prob).eval_h(np.array([1.0, 0.0])) == pytest.approx(1.5, abs=0)

    def test_matches_compensated_summation(self):
        # independent oracle: elementwise terms accumulated with math.fsum
        rng = np.random.default_rng(5)
        n = 120
        d = rng.uniform(0.1, 4.0, n)
        c = rng.standard_normal(n)
        lam = 0.3
        prob = CompositeProblem(
            dim=n,
            f=lambda x: 0.5 * float(d @ ((x - c) ** 2)),
            grad_f=lambda x: d * (x - c),
            simple_part=SimplePart.l1(lam),
        )
        x = rng.standard_normal(n)
        expected = math.fsum(0.5 * d[i] * (x[i] - c[i]) ** 2 for i in range(n))
        expected += math.fsum(lam * abs(x[i]) for i in range(n))
        assert Oracle(prob).eval_h(x) == pytest.approx(expected, rel=1e-12)

    def test_dimension_mismatch(self):
        prob = make_quadratic(np.zeros(3))
        with pytest.raises(ValueError):
            Oracle(prob).eval_h(np.zeros(4))

    def test_nonfinite_result_aborts(self):
        prob = CompositeProblem(dim=1, f=lambda x: float("inf"), grad_f=lambda x: x)
        with pytest.raises(NumericOverflowError):
            Oracle(prob).eval_h(np.zeros(1))


class TestSubgradient:
    def test_least_squares_gradient_vs_finite_differences(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((12, 8))
        y = rng.standard_normal(12)
        prob = CompositeProblem(
            dim=8,
            f=lambda x: 0.5 * float((A @ x - y) @ (A @ x - y)),
            grad_f=lambda x: A.T @ (A @ x - y),
        )
        for _ in range(20):
            x = rng.standard_normal(8)
            g = prob.grad_f(x)
            step = 1e-6 * (1.0 + np.abs(x))
            fd = np.empty(8)
            for j in range(8):
                e = np.zeros(8)
                e[j] = step[j]
                fd[j] = (prob.f(x + e) - prob.f(x - e)) / (2 * step[j])
            assert np.linalg.norm(g - fd) <= 1e-5 * (1.0 + np.linalg.norm(g))

    def test_svm_subgradient_at_origin_all_rows_active(self):
        data = zoo.gen_svm_data(20, 10, seed=2)
        prob = zoo.build_svm(data, 0.5, "l1")
        g = prob.grad_f(np.zeros(prob.dim))
        assert np.allclose(g, -data.A.T @ np.ones(20))

    def test_svm_subgradient_inequality_sampled(self):
        data = zoo.gen_svm_data(20, 10, seed=3)
        prob = zoo.build_svm(data, 0.5, "l1")
        rng = np.random.default_rng(4)
        w = rng.standard_normal(prob.dim)
        fw, gw = prob.f(w), prob.grad_f(w)
        for _ in range(200):
            v = rng.standard_normal(prob.dim) * rng.uniform(0.1, 3.0)
            assert prob.f(v) >= fw + gw @ (v - w) - 1e-10

    def test_domain_violation(self):
        prob = CompositeProblem(
            dim=2,
            f=lambda x: float(x @ x),
            grad_f=lambda x: 2 * x,
            domain=Domain.box(np.zeros(2), np.ones(2)),
        )
        with pytest.raises(DomainViolationError):
            Oracle(prob).pair(np.array([2.0, 0.5]))

    def test_inverted_box_rejected(self):
        with pytest.raises(ValueError):
            Domain.box(np.array([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_infinite_bounds_allowed(self):
        d = Domain.box(np.array([-np.inf, 0.0]), np.array([1.0, np.inf]))
        assert np.array_equal(d.clip(np.array([5.0, -3.0])), [1.0, 0.0])


class TestOracleCounting:
    def test_one_increment_per_call(self):
        prob = make_quadratic(np.zeros(3), lam=1.0)
        oracle = Oracle(prob)
        x = np.ones(3)
        oracle.eval_h(x)
        assert oracle.count == 1
        oracle.pair(x)
        assert oracle.count == 2
        oracle.value_f(x)
        assert oracle.count == 3

    def test_budget_blocks_before_work(self):
        prob = make_quadratic(np.zeros(3))
        oracle = Oracle(prob, budget=2)
        oracle.pair(np.zeros(3))
        oracle.pair(np.zeros(3))
        with pytest.raises(OracleBudgetExceeded):
            oracle.pair(np.zeros(3))
        assert oracle.count == 2

    def test_subgradient_inequality_with_strong_convexity_term(self):
        # every shipped family: f(y) >= f(x) + <g(x), y-x> + mu_f/2 ||y-x||^2
        rng = np.random.default_rng(9)
        bundle = zoo.gen_inverse_laplace(40, seed=1)
        problems = [
            zoo.build_l1_least_squares(bundle, 0.1),
            zoo.build_elastic_net(bundle, 0.05, 0.1),
            zoo.build_svm(zoo.gen_svm_data(15, 10, seed=0), 0.3, "l22l1"),
        ]
        for prob in problems:
            for _ in range(50):
                x = rng.standard_normal(prob.dim)
                y = rng.standard_normal(prob.dim)
                lhs = prob.f(y)
                rhs = prob.f(x) + prob.grad_f(x) @ (y - x) + 0.5 * prob.mu_f * np.sum((y - x) ** 2)
                assert lhs >= rhs - 1e-9 * max(1.0, abs(lhs))


class TestHolderMajorant:
    def test_lipschitz_case_is_exact(self):
        assert holder_majorant(1.0, 5.0, 0.3) == 5.0

    def test_nonsmooth_case(self):
        assert holder_majorant(0.0, 2.0, 0.1) == pytest.approx(40.0, rel=1e-14)

    def test_intermediate_case_frozen_value(self):
        # ((0.5)/(0.2*1.5))**(1/3) * 3**(4/3), evaluated at 50 digits
        assert holder_majorant(0.5, 3.0, 0.2) == pytest.approx(5.1299278400300909681, rel=1e-14)

    def test_monotone_decreasing_in_delta_below_one(self):
        for nu in (0.0, 0.25, 0.7):
            grid = [holder_majorant(nu, 2.0, d) for d in np.geomspace(1e-3, 10, 25)]
            assert all(a > b for a, b in zip(grid, grid[1:]))

    def test_constant_in_delta_at_one(self):
        vals = {holder_majorant(1.0, 3.5, d) for d in np.geomspace(1e-3, 10, 25)}
        assert vals == {3.5}

    def test_invalid_delta(self):
        with pytest.raises(ValueError):
            holder_majorant(0.5, 1.0, 0.0)


class TestBregman:
    def test_identity_case(self):
        model = EuclideanProx(center=np.zeros(2))
        x = np.array([1.3, -0.2])
        assert bregman(model, x, x) == 0.0

    def test_unit_distance(self):
        model = EuclideanProx(center=np.zeros(2))
        assert bregman(model, np.array([1.0, 0.0]), np.zeros(2)) == 0.5

    def test_lower_bound_met_with_equality(self):
        rng = np.random.default_rng(3)
        model = EuclideanProx(center=rng.standard_normal(6))
        for _ in range(50):
            x, y = rng.standard_normal(6), rng.standard_normal(6)
            b = bregman(model, x, y)
            half_sq = 0.5 * float((x - y) @ (x - y))
            assert b >= half_sq - 1e-15
            assert b == pytest.approx(half_sq, rel=1e-12)

    def test_dimension_mismatch(self):
        model = EuclideanProx(center=np.zeros(2))
        with pytest.raises(ValueError):
            bregman(model, np.zeros(2), np.zeros(3))
