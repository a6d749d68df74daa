"""Benchmark problem generators and builders.

Three families: l1-regularized least squares on a severely ill-conditioned
exponential-kernel matrix, its strongly convex elastic-net variant (optionally
box-constrained), and hinge-loss linear SVM training with three regularizer
choices.  Generators are pure functions of their parameters and seed; built
problems are immutable.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .problems import CompositeProblem, Domain, SimplePart, Smoothness


class LabeledCsvError(ValueError):
    """Malformed labeled-CSV input; the message names the offending line."""


def spectral_norm(A, seed=0, tol=1e-8, max_iter=1000):
    """Largest singular value of a dense matrix by power iteration on ``A^T A``.

    Seeded start vector, relative-change stopping at ``tol``, hard cap at
    ``max_iter`` sweeps.
    """
    A = np.asarray(A, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    sigma_prev = 0.0
    sigma = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        lam = float(v @ w)
        sigma = np.sqrt(max(lam, 0.0))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(sigma - sigma_prev) <= tol * max(sigma, 1e-300):
            break
        sigma_prev = sigma
    return sigma


@dataclass(frozen=True)
class InstanceBundle:
    """A dense linear model ``A x ~ y`` with the generating truth and parameters."""

    A: np.ndarray
    y: np.ndarray
    x_true: np.ndarray = None
    meta: dict = field(default_factory=dict)


def gen_inverse_laplace(n, seed, m=None, density=10.0, s_lo=0.05, s_hi=5.0):
    """Severely ill-conditioned instance from a discretized exponential kernel.

    Quadrature discretization of ``g(s) = int_0^T exp(-s t) x(t) dt``:
    composite-trapezoid nodes ``t_j`` and weights ``w_j`` on
    ``[0, max(10, n/density)]`` give ``A[i, j] = w_j * exp(-s_i * t_j)`` on a
    logarithmic grid of ``m`` sample points ``s_i`` (the node count per unit
    of ``t`` stays fixed as ``n`` grows, so solution norms do not scale with
    the discretization).  The smooth truth is ``x(t) = exp(-t/2)``; the
    observation is ``y = A x_true + 0.1 * u`` with one uniform(0, 1) draw
    ``u`` shared by all entries (a constant offset, so the data stay nearly
    consistent), from the seeded generator.  Deterministic per parameters
    and seed; the spectral condition number grows exponentially in ``n``
    (well past 1e6 at ``n = 100``).
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    m = n if m is None else int(m)
    if m < 1:
        raise ValueError("m must be positive")

    t_max = max(10.0, n / density)
    t = np.linspace(0.0, t_max, n)
    w = np.full(n, t_max / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    s = np.geomspace(s_lo, s_hi, m)

    A = w[None, :] * np.exp(-np.outer(s, t))
    x_true = np.exp(-0.5 * t)
    z = A @ x_true
    rng = np.random.default_rng(seed)
    y = z + 0.1 * rng.uniform()
    meta = {
        "family": "inverse_laplace",
        "n": int(n),
        "m": int(m),
        "seed": int(seed),
        "t_max": t_max,
        "s_range": (s_lo, s_hi),
    }
    return InstanceBundle(A=A, y=y, x_true=x_true, meta=meta)


def _least_squares_oracle(A, y):
    def f(x):
        r = A @ x - y
        return 0.5 * float(r @ r)

    def grad(x):
        return A.T @ (A @ x - y)

    return f, grad


def build_l1_least_squares(bundle: InstanceBundle, lam: float) -> CompositeProblem:
    """``0.5 * ||y - A x||^2 + lam * ||x||_1`` over the whole space.

    Smooth part is Lipschitz (``nu = 1``) with constant ``||A||_2^2``
    estimated by the seeded power method.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    A, y = bundle.A, bundle.y
    f, grad = _least_squares_oracle(A, y)
    L = spectral_norm(A) ** 2
    return CompositeProblem(
        dim=A.shape[1],
        f=f,
        grad_f=grad,
        simple_part=SimplePart.l1(lam),
        domain=Domain.whole_space(),
        smoothness=Smoothness(nu=1.0, L=L),
        name="l1",
    )


def build_elastic_net(bundle: InstanceBundle, lam1: float, lam2: float, box: Domain = None):
    """``0.5 * ||y - A x||^2 + 0.5 * lam1 * ||x||^2 + lam2 * ||x||_1``.

    The squared-norm term lives in the smooth part, so ``mu_f = lam1`` and
    the Lipschitz constant is ``||A||_2^2 + lam1``.  An optional box turns
    this into the constrained variant (``[-1, 1]^n`` being the conventional
    choice).
    """
    if lam1 <= 0 or lam2 <= 0:
        raise ValueError("regularization parameters must be positive")
    A, y = bundle.A, bundle.y
    f_ls, grad_ls = _least_squares_oracle(A, y)

    def f(x):
        return f_ls(x) + 0.5 * lam1 * float(x @ x)

    def grad(x):
        return grad_ls(x) + lam1 * x

    L = spectral_norm(A) ** 2 + lam1
    constrained = box is not None and box.is_box()
    return CompositeProblem(
        dim=A.shape[1],
        f=f,
        grad_f=grad,
        simple_part=SimplePart.l1(lam2),
        domain=box if constrained else Domain.whole_space(),
        mu_f=lam1,
        smoothness=Smoothness(nu=1.0, L=L),
        name="elastic_net_box" if constrained else "elastic_net",
    )


def unit_box(n):
    return Domain.box(-np.ones(n), np.ones(n))


@dataclass(frozen=True)
class SvmData:
    """Binary-classification training data and its label-folded design matrix.

    ``A`` has rows ``(label_i * x_i, label_i)`` of length ``n + 1``; the last
    column corresponds to the intercept.
    """

    X: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float)
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if self.X.shape[0] != labels.shape[0]:
            raise ValueError("feature rows and labels disagree")

    @property
    def A(self):
        lab = np.asarray(self.labels, dtype=float)
        return np.hstack([lab[:, None] * self.X, lab[:, None]])


def gen_svm_data(m, n, seed, separation=0.5):
    """Synthetic Gaussian two-class data: labels from a random hyperplane,
    class means pushed apart by ``separation``."""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    labels = np.where(rng.uniform(size=m) < 0.5, -1.0, 1.0)
    X = rng.standard_normal((m, n)) + separation * labels[:, None] * direction[None, :]
    return SvmData(X=X, labels=labels)


SVM_REGULARIZERS = ("l1", "l22", "l22l1")


def build_svm(data: SvmData, lam: float, reg: str, block_strong_convexity=False):
    """Hinge-loss SVM training problem with the chosen regularizer.

    The loss is ``f(w~) = <1, [1 - A w~]_+>`` with subgradient ``-A^T delta``,
    where ``delta_i = 1`` exactly when ``A[i, :] @ w~ < 1`` (ties give 0).
    The intercept (last coordinate) is never penalized.  ``reg`` selects
    ``lam * ||w||_1`` in the simple part ("l1"), ``0.5 * lam * ||w||^2``
    folded into the loss ("l22"), or both ("l22l1").  The quadratic variants
    are strongly convex only on the ``w`` block, so ``mu_f`` stays 0 unless
    ``block_strong_convexity`` asserts the block-restricted reading.
    Subgradient variation is bounded (``nu = 0``) with
    ``L_0 = sqrt(m) * ||A||_2``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if reg not in SVM_REGULARIZERS:
        raise ValueError(f"reg must be one of {SVM_REGULARIZERS}")
    A = data.A
    m, dim = A.shape
    quad = reg in ("l22", "l22l1")

    def hinge(w):
        return float(np.sum(np.maximum(1.0 - A @ w, 0.0)))

    def f(w):
        val = hinge(w)
        if quad:
            val += 0.5 * lam * float(w[:-1] @ w[:-1])
        return val

    def grad(w):
        delta = (A @ w < 1.0).astype(float)
        g = -A.T @ delta
        if quad:
            g[:-1] += lam * w[:-1]
        return g

    if reg in ("l1", "l22l1"):
        weights = np.full(dim, lam)
        weights[-1] = 0.0  # intercept unpenalized
        simple = SimplePart.l1(weights)
    else:
        simple = SimplePart.zero()

    L0 = np.sqrt(m) * spectral_norm(A)
    return CompositeProblem(
        dim=dim,
        f=f,
        grad_f=grad,
        simple_part=simple,
        domain=Domain.whole_space(),
        mu_f=lam if (quad and block_strong_convexity) else 0.0,
        smoothness=Smoothness(nu=0.0, L=L0),
        name=f"svm_{reg}",
    )


def load_labeled_csv(path) -> SvmData:
    """Parse labeled samples: one per line, label (+-1) first, features after.

    UTF-8, no header, '.' decimal.  Malformed rows raise
    :class:`LabeledCsvError` naming the 1-based line; an empty file is
    rejected outright.
    """
    rows = []
    labels = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record:
                continue
            try:
                values = [float(v) for v in record]
            except ValueError as exc:
                raise LabeledCsvError(f"line {lineno}: {exc}") from None
            if values[0] not in (-1.0, 1.0):
                raise LabeledCsvError(f"line {lineno}: label must be -1 or +1, got {values[0]!r}")
            if len(values) < 2:
                raise LabeledCsvError(f"line {lineno}: expected at least one feature")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise LabeledCsvError(
                    f"line {lineno}: expected {width - 1} features, got {len(values) - 1}"
                )
            labels.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise ValueError("empty labeled-CSV file")
    return SvmData(X=np.array(rows, dtype=float), labels=np.array(labels, dtype=float))


def save_labeled_csv(path, data: SvmData):
    """Inverse of :func:`load_labeled_csv`; floats are written with full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for label, row in zip(data.labels, data.X):
            writer.writerow([repr(float(label))] + [repr(float(v)) for v in row])
