import numpy as np
import pytest

from accelopt import SolverConfig, run_solver
from accelopt import zoo
from accelopt.zoo import LabeledCsvError


class TestGenerator:
    def test_seed_determinism(self):
        a = zoo.gen_inverse_laplace(64, seed=3)
        b = zoo.gen_inverse_laplace(64, seed=3)
        assert np.array_equal(a.A, b.A)
        assert np.array_equal(a.y, b.y)
        c = zoo.gen_inverse_laplace(64, seed=4)
        assert not np.array_equal(a.y, c.y)

    def test_severe_ill_conditioning(self):
        bundle = zoo.gen_inverse_laplace(100, seed=1)
        assert np.linalg.cond(bundle.A) >= 1e6

    def test_noise_magnitude(self):
        bundle = zoo.gen_inverse_laplace(50, seed=2)
        assert np.max(np.abs(bundle.y - bundle.A @ bundle.x_true)) <= 0.1

    def test_rectangular_shapes(self):
        bundle = zoo.gen_inverse_laplace(200, seed=0, m=100)
        assert bundle.A.shape == (100, 200)
        assert bundle.y.shape == (100,)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            zoo.gen_inverse_laplace(4, seed=0)


class TestSpectralNorm:
    def test_against_dense_svd(self):
        rng = np.random.default_rng(0)
        for shape in [(30, 50), (50, 30), (40, 40)]:
            A = rng.standard_normal(shape)
            sv = np.linalg.svd(A, compute_uv=False)[0]
            assert zoo.spectral_norm(A) == pytest.approx(sv, rel=1e-6)

    def test_zero_matrix(self):
        assert zoo.spectral_norm(np.zeros((5, 5))) == 0.0


class TestL1LeastSquares:
    def test_huge_penalty_drives_solution_to_zero(self):
        bundle = zoo.gen_inverse_laplace(40, seed=1)
        lam = 2.0 * np.max(np.abs(bundle.A.T @ bundle.y))
        prob = zoo.build_l1_least_squares(bundle, lam)
        tr = run_solver(prob, "asga1", SolverConfig(eps=1e-6, max_iters=300))
        assert np.max(np.abs(tr.x)) <= 1e-6

    def test_gradient_matches_finite_differences(self):
        bundle = zoo.gen_inverse_laplace(30, seed=2)
        prob = zoo.build_l1_least_squares(bundle, 0.1)
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.standard_normal(prob.dim)
            g = prob.grad_f(x)
            fd = np.empty(prob.dim)
            for j in range(prob.dim):
                e = np.zeros(prob.dim)
                e[j] = 1e-6
                fd[j] = (prob.f(x + e) - prob.f(x - e)) / 2e-6
            assert np.linalg.norm(g - fd) <= 1e-5 * (1.0 + np.linalg.norm(g))

    def test_curvature_constant_matches_svd(self):
        bundle = zoo.gen_inverse_laplace(60, seed=4)
        prob = zoo.build_l1_least_squares(bundle, 0.1)
        exact = np.linalg.svd(bundle.A, compute_uv=False)[0] ** 2
        assert prob.smoothness.L == pytest.approx(exact, rel=1e-4)

    def test_invalid_penalty(self):
        bundle = zoo.gen_inverse_laplace(20, seed=0)
        with pytest.raises(ValueError):
            zoo.build_l1_least_squares(bundle, 0.0)


class TestElasticNet:
    def test_strong_convexity_witness(self):
        bundle = zoo.gen_inverse_laplace(30, seed=5)
        lam1 = 0.05
        prob = zoo.build_elastic_net(bundle, lam1, 0.1)
        rng = np.random.default_rng(6)
        for _ in range(100):
            x, y = rng.standard_normal(30), rng.standard_normal(30)
            mid = 0.5 * (x + y)

            def residual_part(v):
                return prob.f(v) - 0.5 * lam1 * float(v @ v)

            assert residual_part(mid) <= 0.5 * (residual_part(x) + residual_part(y)) + 1e-10

    def test_modulus_exposed_once(self):
        bundle = zoo.gen_inverse_laplace(30, seed=5)
        prob = zoo.build_elastic_net(bundle, 0.05, 0.1)
        assert prob.mu_f == 0.05
        assert prob.mu_p == 0.0
        assert prob.smoothness.L == pytest.approx(
            np.linalg.svd(bundle.A, compute_uv=False)[0] ** 2 + 0.05, rel=1e-4
        )

    def test_strong_convexity_speeds_up_solver(self):
        bundle = zoo.gen_inverse_laplace(50, seed=5)
        prob = zoo.build_elastic_net(bundle, 1e-2, 1e-3)
        h_star = run_solver(prob, "asga1", SolverConfig(eps=1e-12, max_iters=5000)).best_h

        def calls(mu):
            tr = run_solver(prob, "asga1", SolverConfig(eps=1e-8, max_iters=3000, mu=mu))
            for rec in tr.records:
                if rec.h - h_star <= 1e-6:
                    return rec.N_f
            raise AssertionError("gap not reached")

        assert calls(prob.mu) < calls(0.0)

    def test_box_variant(self):
        bundle = zoo.gen_inverse_laplace(25, seed=7)
        prob = zoo.build_elastic_net(bundle, 1e-3, 1e-3, box=zoo.unit_box(25))
        assert prob.domain.is_box()
        assert prob.name == "elastic_net_box"
        tr = run_solver(prob, "asga3", SolverConfig(eps=1e-4, max_iters=100))
        assert prob.domain.contains(tr.x)

    def test_invalid_parameters(self):
        bundle = zoo.gen_inverse_laplace(20, seed=0)
        with pytest.raises(ValueError):
            zoo.build_elastic_net(bundle, 0.0, 0.1)
        with pytest.raises(ValueError):
            zoo.build_elastic_net(bundle, 0.1, -1.0)


class TestSvm:
    def test_value_at_origin_is_sample_count(self):
        data = zoo.gen_svm_data(50, 200, seed=1)
        for reg in zoo.SVM_REGULARIZERS:
            prob = zoo.build_svm(data, 0.1, reg)
            assert prob.h(np.zeros(prob.dim)) == 50.0

    def test_indicator_flips_exactly_at_unit_margin(self):
        data = zoo.gen_svm_data(10, 5, seed=2)
        prob = zoo.build_svm(data, 0.1, "l1")
        A = data.A
        rng = np.random.default_rng(3)
        w = rng.standard_normal(prob.dim)
        margins = A @ w
        # scale w so the first margin crosses 1 while others stay put
        scale_below = 0.999 / margins[0]
        scale_above = 1.001 / margins[0]
        if margins[0] < 0:
            scale_below, scale_above = scale_above, scale_below
        g_below = prob.grad_f(w * scale_below)
        g_at = prob.grad_f(w * (1.0 / margins[0]))
        delta_below = (A @ (w * scale_below) < 1.0).astype(float)
        assert np.allclose(g_below, -A.T @ delta_below)
        # exactly at the margin the tie contributes zero
        delta_at = (A @ (w / margins[0]) < 1.0).astype(float)
        assert delta_at[0] == 0.0
        assert np.allclose(g_at, -A.T @ delta_at)

    def test_subgradient_inequality_all_regularizers(self):
        data = zoo.gen_svm_data(30, 20, seed=4)
        rng = np.random.default_rng(5)
        for reg in zoo.SVM_REGULARIZERS:
            prob = zoo.build_svm(data, 0.2, reg)
            w = rng.standard_normal(prob.dim)
            fw, gw = prob.f(w), prob.grad_f(w)
            for _ in range(200):
                v = rng.standard_normal(prob.dim) * rng.uniform(0.2, 2.0)
                assert prob.f(v) >= fw + gw @ (v - w) - 1e-9

    def test_intercept_not_penalized(self):
        data = zoo.gen_svm_data(10, 5, seed=6)
        prob = zoo.build_svm(data, 0.5, "l22l1")
        e_intercept = np.zeros(prob.dim)
        e_intercept[-1] = 3.0
        assert prob.psi(e_intercept) == 0.0
        e_w = np.zeros(prob.dim)
        e_w[0] = 3.0
        assert prob.psi(e_w) == 1.5
        # the quadratic term also skips the intercept
        assert prob.f(e_intercept) == prob.h(e_intercept)

    def test_block_strong_convexity_flag(self):
        data = zoo.gen_svm_data(10, 5, seed=6)
        assert zoo.build_svm(data, 0.5, "l22").mu_f == 0.0
        assert zoo.build_svm(data, 0.5, "l22", block_strong_convexity=True).mu_f == 0.5

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            zoo.SvmData(X=np.ones((2, 2)), labels=np.array([1.0, 2.0]))

    def test_invalid_regularizer_name(self):
        data = zoo.gen_svm_data(5, 3, seed=0)
        with pytest.raises(ValueError):
            zoo.build_svm(data, 0.1, "l2ball")


class TestHolderUpperBounds:
    def test_sampled_gradient_variation(self):
        rng = np.random.default_rng(8)
        bundle = zoo.gen_inverse_laplace(40, seed=8)
        problems = [
            zoo.build_l1_least_squares(bundle, 0.1),
            zoo.build_elastic_net(bundle, 0.05, 0.1),
            zoo.build_svm(zoo.gen_svm_data(25, 15, seed=8), 0.1, "l1"),
        ]
        for prob in problems:
            nu, L = prob.smoothness.nu, prob.smoothness.L
            for _ in range(500):
                x = rng.standard_normal(prob.dim)
                y = rng.standard_normal(prob.dim)
                lhs = np.linalg.norm(prob.grad_f(x) - prob.grad_f(y))
                assert lhs <= L * np.linalg.norm(x - y) ** nu + 1e-9


class TestLabeledCsv:
    def test_round_trip(self, tmp_path):
        data = zoo.gen_svm_data(8, 5, seed=9)
        path = tmp_path / "samples.csv"
        zoo.save_labeled_csv(path, data)
        back = zoo.load_labeled_csv(path)
        assert np.array_equal(back.labels, data.labels)
        assert np.max(np.abs(back.X - data.X)) <= 1e-15

    def test_two_row_toy_file(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,0.5,-1.25\n-1,2.0,3.5\n", encoding="utf-8")
        data = zoo.load_labeled_csv(path)
        assert data.X.shape == (2, 2)
        assert list(data.labels) == [1.0, -1.0]

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0.5\n-1,oops\n", encoding="utf-8")
        with pytest.raises(LabeledCsvError, match="line 2"):
            zoo.load_labeled_csv(path)

    def test_bad_label_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,0.5\n2,1.0\n", encoding="utf-8")
        with pytest.raises(LabeledCsvError, match="line 2"):
            zoo.load_labeled_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,0.5,1.0\n-1,2.0\n", encoding="utf-8")
        with pytest.raises(LabeledCsvError, match="line 2"):
            zoo.load_labeled_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValueError):
            zoo.load_labeled_csv(path)
