import numpy as np
import pytest

from agrnn import assembly, geometry, pde
from agrnn.assembly import (
    LsqSystem,
    loss_eta,
    relative_l2_error,
    solve_qr,
    solve_with_frozen,
)
from agrnn.basis import DenseLayerBlock, RnnSpace, Solution, get_activation, zero_solution
from agrnn.errors import InvalidConfigError, SingularSystemError


def small_poisson_colloc(n=60):
    problem = pde.build_problem("poisson-1")
    interior = geometry.sample_interior(problem.domain, [n])
    boundary = geometry.sample_boundary(problem.domain, problem.segments)
    return problem, geometry.CollocationSet(interior.interior, boundary)


class TestAssemble:
    def test_poisson_row_is_negative_second_derivative(self):
        # single Gaussian neuron phi(x) = exp(-x^2/2): -phi''(0) = 1
        problem, _ = small_poisson_colloc()
        space = RnnSpace((DenseLayerBlock(np.array([[1.0]]), np.array([0.0]), get_activation("gaussian")),))
        colloc = geometry.CollocationSet(np.array([[0.0]]), ())
        system = assembly.assemble(problem, space, colloc)
        np.testing.assert_allclose(system.matrix, [[1.0]], rtol=1e-15)

    def test_boundary_rows_scaled_by_eta(self):
        problem, colloc = small_poisson_colloc()
        problem = problem.with_eta(3000.0)
        rng = np.random.default_rng(0)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-2, 2, (5, 1)), rng.uniform(-1, 1, 5), get_activation("tanh")),))
        system = assembly.assemble(problem, space, colloc)
        features = space.features(colloc.boundary_points())
        boundary_rows = np.vstack([system.matrix[t.rows] for t in system.tags if t.kind == "boundary"])
        np.testing.assert_allclose(boundary_rows, 3000.0 * features, rtol=1e-14)

    def test_ar_row_is_y_derivative(self):
        problem = pde.build_problem("ar-2")
        rng = np.random.default_rng(1)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-2, 2, (4, 2)), rng.uniform(-1, 1, 4), get_activation("tanh")),))
        pts = rng.uniform(0.1, 0.9, (6, 2))
        colloc = geometry.CollocationSet(pts, ())
        system = assembly.assemble(problem, space, colloc)
        jets = space.eval_jets(pts, order=1)
        np.testing.assert_allclose(system.matrix, jets.grad[:, :, 1], rtol=1e-14)

    @pytest.mark.parametrize("pid", ["poisson-2", "ar-1", "burgers-2"])
    def test_fused_rows_match_jets_reference(self, pid):
        # dense + composite blocks, with and without envelopes, against the
        # tensor-contraction reference
        from tests.test_basis import random_composite, random_dense

        problem = pde.build_problem(pid)
        rng = np.random.default_rng(17)
        dense = random_dense(rng, m=8, d=2, activation="tanh")
        for localize in (False, True):
            comp = random_composite(rng, dense, localize)
            space = RnnSpace((dense, comp))
            pts = rng.uniform(0.05, 0.95, (30, 2))
            if problem.operator.linear:
                lin = problem.operator.linearize(pts)
            else:
                state = Solution(space, rng.uniform(-1, 1, space.dim))
                lin = problem.operator.linearize(pts, state, scheme="newton")
            fused = assembly.operator_rows(space, pts, lin)
            ref = assembly.operator_rows_reference(space, pts, lin)
            scale = np.max(np.abs(ref)) + 1.0
            np.testing.assert_allclose(fused, ref, rtol=1e-12, atol=1e-12 * scale)

    def test_loss_from_system_matches_direct(self):
        problem, colloc = small_poisson_colloc(100)
        rng = np.random.default_rng(18)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-5, 5, (12, 1)), rng.uniform(-2, 2, 12), get_activation("tanh")),))
        system = assembly.assemble(problem, space, colloc)
        rep = solve_qr(system)
        a = assembly.loss_from_system(system, rep.coeffs)
        b = loss_eta(problem, Solution(space, rep.coeffs), colloc)
        np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-12)

    def test_row_tags_cover_all_rows(self):
        problem, colloc = small_poisson_colloc()
        rng = np.random.default_rng(2)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-2, 2, (3, 1)), rng.uniform(-1, 1, 3), get_activation("tanh")),))
        system = assembly.assemble(problem, space, colloc)
        covered = sorted((t.rows.start, t.rows.stop) for t in system.tags)
        assert covered[0][0] == 0 and covered[-1][1] == system.matrix.shape[0]
        assert system.matrix.shape == (colloc.n_interior + colloc.n_boundary, space.dim)


class TestSolveQr:
    def test_consistent_system(self):
        rep = solve_qr((np.array([[1.0], [1.0]]), np.array([1.0, 1.0])))
        np.testing.assert_allclose(rep.coeffs, [1.0])
        assert rep.residual_norm < 1e-14
        assert rep.effective_rank == 1 and rep.dropped_columns == 0

    def test_projection(self):
        rep = solve_qr((np.array([[1.0], [1.0]]), np.array([0.0, 2.0])))
        np.testing.assert_allclose(rep.coeffs, [1.0])
        np.testing.assert_allclose(rep.residual_norm, np.sqrt(2.0), rtol=1e-14)

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            A = rng.normal(size=(200, 50))
            b = rng.normal(size=200)
            rep = solve_qr((A, b))
            c_ref = np.linalg.solve(A.T @ A, A.T @ b)
            ref_res = np.linalg.norm(A @ c_ref - b)
            np.testing.assert_allclose(rep.coeffs, c_ref, rtol=1e-8)
            assert rep.residual_norm <= ref_res * (1 + 1e-8)

    def test_report_residual_identity(self):
        rng = np.random.default_rng(8)
        A = rng.normal(size=(40, 10))
        b = rng.normal(size=40)
        rep = solve_qr((A, b))
        direct = np.linalg.norm(A @ rep.coeffs - b)
        assert abs(rep.residual_norm - direct) <= 1e-10 * max(direct, 1.0)

    def test_rank_deficient_drops_columns(self):
        rng = np.random.default_rng(9)
        A = rng.normal(size=(30, 6))
        A[:, 5] = 2 * A[:, 0] - A[:, 3]
        b = rng.normal(size=30)
        rep = solve_qr((A, b))
        assert rep.dropped_columns == 1
        assert rep.effective_rank == 5
        assert np.sum(rep.coeffs == 0.0) >= 1

    def test_all_zero_matrix_is_singular(self):
        with pytest.raises(SingularSystemError):
            solve_qr((np.zeros((4, 3)), np.ones(4)))

    def test_monotone_enrichment(self):
        rng = np.random.default_rng(10)
        A = rng.normal(size=(120, 40))
        b = rng.normal(size=120)
        res_small = solve_qr((A[:, :25], b)).residual_norm
        res_big = solve_qr((A, b)).residual_norm
        assert res_big <= res_small + 1e-10

    def test_solve_with_frozen(self):
        rng = np.random.default_rng(11)
        A = rng.normal(size=(50, 8))
        b = rng.normal(size=50)
        sys_ = LsqSystem(A, b, (), 1.0, (slice(0, 4), slice(4, 8)))
        frozen_coeffs = rng.normal(size=4)
        rep = solve_with_frozen(sys_, slice(0, 4), frozen_coeffs)
        np.testing.assert_array_equal(rep.coeffs[:4], frozen_coeffs)
        # the free part solves the reduced least-squares problem
        c_ref = np.linalg.lstsq(A[:, 4:], b - A[:, :4] @ frozen_coeffs, rcond=None)[0]
        np.testing.assert_allclose(rep.coeffs[4:], c_ref, rtol=1e-10)


class _AnalyticOscillatory:
    """Exact 1-d oscillatory solution with analytic jets, for loss checks."""

    def predict(self, pts):
        return pde.oscillatory_exact(pts)

    def jet_values(self, pts, order=2):
        x = np.atleast_2d(pts)[:, 0]
        val = pde.oscillatory_exact(pts)
        grad = sum((2.0**s * np.pi) * np.cos(2.0**s * np.pi * x) for s in range(1, 7)) / 6.0
        sec = -sum((2.0**s * np.pi) ** 2 * np.sin(2.0**s * np.pi * x) for s in range(1, 7)) / 6.0
        return val, grad[:, None], sec[:, None]


class TestLoss:
    def test_exact_solution_has_tiny_loss(self):
        problem, colloc = small_poisson_colloc(200)
        _, _, combined = loss_eta(problem, _AnalyticOscillatory(), colloc)
        assert combined <= 1e-6

    def test_zero_solution_interior_rms_is_rms_of_f(self):
        problem, colloc = small_poisson_colloc(120)
        rng = np.random.default_rng(12)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-2, 2, (4, 1)), rng.uniform(-1, 1, 4), get_activation("gaussian")),))
        interior_rms, boundary_rms, _ = loss_eta(problem, zero_solution(space), colloc)
        f_rms = float(np.sqrt(np.mean(problem.rhs(colloc.interior) ** 2)))
        np.testing.assert_allclose(interior_rms, f_rms, rtol=1e-14)

    def test_eta_scaling_consistency(self):
        problem, colloc = small_poisson_colloc(80)
        rng = np.random.default_rng(13)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-8, 8, (30, 1)), rng.uniform(-4, 4, 30), get_activation("tanh")),))
        s = 7.0
        sys1 = assembly.assemble(problem.with_eta(1.0), space, colloc)
        sys2 = assembly.assemble(problem.with_eta(s), space, colloc)
        for tag1, tag2 in zip(sys1.tags, sys2.tags):
            if tag1.kind == "boundary":
                np.testing.assert_allclose(sys2.matrix[tag2.rows], s * sys1.matrix[tag1.rows], rtol=1e-14)
                np.testing.assert_allclose(sys2.rhs[tag2.rows], s * sys1.rhs[tag1.rows], rtol=1e-14)

    def test_growing_eta_shrinks_boundary_residual(self):
        problem, colloc = small_poisson_colloc(80)
        rng = np.random.default_rng(14)
        space = RnnSpace((DenseLayerBlock(rng.uniform(-8, 8, (30, 1)), rng.uniform(-4, 4, 30), get_activation("tanh")),))
        boundary_rms = []
        for eta in (1.0, 1e2, 1e4):
            p = problem.with_eta(eta)
            rep = solve_qr(assembly.assemble(p, space, colloc))
            _, b_rms, _ = loss_eta(p, Solution(space, rep.coeffs), colloc)
            boundary_rms.append(b_rms)
        assert boundary_rms[2] < boundary_rms[1] < boundary_rms[0]


class TestRelativeL2:
    def setup_method(self):
        self.rule = geometry.tensor_quadrature(geometry.Hypercube(np.array([0.0]), np.array([1.0])), 50)
        self.exact = lambda pts: np.sin(np.pi * pts[:, 0]) + 2.0

    def test_identity_is_zero(self):
        assert relative_l2_error(self.exact, self.exact, self.rule) == 0.0

    def test_doubling_gives_one(self):
        double = lambda pts: 2.0 * self.exact(pts)
        assert abs(relative_l2_error(double, self.exact, self.rule) - 1.0) < 1e-12

    def test_constant_shift(self):
        one = lambda pts: np.ones(pts.shape[0])
        shifted = lambda pts: one(pts) + 0.1
        assert abs(relative_l2_error(shifted, one, self.rule) - 0.1) < 1e-12

    def test_zero_exact_rejected(self):
        zero = lambda pts: np.zeros(pts.shape[0])
        with pytest.raises(InvalidConfigError):
            relative_l2_error(self.exact, zero, self.rule)
