import numpy as np
import pytest

from accelopt import CompositeProblem, SimplePart, Smoothness


def diagonal_quadratic(n, curvatures, center, mu_declared=0.0, name="quad"):
    """f(x) = 0.5 * sum d_i (x_i - c_i)^2 with exact minimizer ``center``."""
    d = np.asarray(curvatures, dtype=float)
    c = np.asarray(center, dtype=float)
    return CompositeProblem(
        dim=n,
        f=lambda x: 0.5 * float(d @ ((x - c) ** 2)),
        grad_f=lambda x: d * (x - c),
        mu_f=mu_declared,
        smoothness=Smoothness(nu=1.0, L=float(np.max(d))),
        name=name,
    )


@pytest.fixture
def quad50():
    rng = np.random.default_rng(11)
    n = 50
    d = np.linspace(0.5, 10.0, n)
    c = rng.standard_normal(n)
    return diagonal_quadratic(n, d, c)


def lasso_problem(A, y, lam):
    from accelopt import zoo
    from accelopt.zoo import InstanceBundle

    return zoo.build_l1_least_squares(InstanceBundle(A=A, y=y), lam)
