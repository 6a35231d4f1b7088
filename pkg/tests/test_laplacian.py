from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import symform as sf
from conftest import path_eigenvalues, slowest_rate


def hand_built_incidence_c3() -> np.ndarray:
    # path tree on C_3: edges (1,2), (2,3), both labeled with the third turn
    w = sf.rotation2(2 * math.pi / 3).matrix
    e = np.zeros((6, 4))
    e[0:2, 0:2] = np.eye(2)
    e[2:4, 0:2] = -w
    e[2:4, 2:4] = np.eye(2)
    e[4:6, 2:4] = -w
    return e


class TestIncidence:
    def test_triangle_blocks_frozen(self):
        graph, tau = sf.cycle_minus_edge(3, (3, 1)), sf.assignment(3)
        inc = sf.build_incidence(graph, tau)
        assert inc.matrix.shape == (6, 4)
        assert np.array_equal(inc.matrix, hand_built_incidence_c3())
        assert inc.edge_index == ((1, 2), (2, 3))

    def test_residual_zero_on_compatible_configuration(self):
        graph, tau = sf.cycle_minus_edge(5, (5, 1)), sf.assignment(5)
        chain = sf.rotation_chain(graph, tau)
        p = sf.symmetric_configuration(chain, np.array([1.3, -0.4]))
        inc = sf.build_incidence(graph, tau)
        assert np.abs(inc.residuals(p)).max() < 1e-14

    def test_residual_is_direct_edge_mismatch(self):
        graph, tau = sf.cycle_minus_edge(4, (4, 1)), sf.assignment(4)
        inc = sf.build_incidence(graph, tau)
        rng = np.random.default_rng(3)
        p = rng.uniform(-2, 2, 8)
        res = inc.residuals(p)
        for e, (u, v, w) in enumerate(sf.weighted_edges(graph, tau)):
            direct = p[2 * u - 2:2 * u] - w.T @ p[2 * v - 2:2 * v]
            assert np.allclose(res[e], direct, atol=1e-15)

    def test_weight_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            sf.incidence_from_edges(3, 2, [(1, 2, np.eye(3))])


class TestLaplacian:
    def test_square_block_pattern_frozen(self):
        graph, tau = sf.cycle_minus_edge(4, (4, 1)), sf.assignment(4)
        q = sf.build_laplacian(graph, tau).matrix
        r = sf.rotation2(math.pi / 2).matrix
        eye = np.eye(2)
        assert np.array_equal(q[0:2, 0:2], eye)
        assert np.array_equal(q[2:4, 2:4], 2 * eye)
        assert np.array_equal(q[4:6, 4:6], 2 * eye)
        assert np.array_equal(q[6:8, 6:8], eye)
        assert np.array_equal(q[0:2, 2:4], -r.T)
        assert np.array_equal(q[2:4, 0:2], -r)
        assert np.array_equal(q[2:4, 4:6], -r.T)
        assert np.array_equal(q[6:8, 4:6], -r)
        assert np.array_equal(q[0:2, 4:6], np.zeros((2, 2)))
        assert np.array_equal(q[0:2, 6:8], np.zeros((2, 2)))
        assert np.array_equal(q[2:4, 6:8], np.zeros((2, 2)))

    @given(st.integers(3, 12), st.integers(0, 11))
    @settings(max_examples=40, deadline=None)
    def test_product_route_agrees(self, n, removed_idx):
        removed = sf.CycleGraph(n).edges[removed_idx % n]
        graph, tau = sf.cycle_minus_edge(n, removed), sf.assignment(n)
        lap = sf.build_laplacian(graph, tau)
        assert np.abs(lap.matrix - sf.product_laplacian(lap.incidence)).max() <= 1e-12

    def test_symmetric_exactly(self):
        graph, tau = sf.cycle_minus_edge(7, (7, 1)), sf.assignment(7)
        q = sf.build_laplacian(graph, tau).matrix
        assert np.array_equal(q, q.T)

    def test_quadratic_form_nonnegative_and_matches_residuals(self):
        graph, tau = sf.cycle_minus_edge(6, (6, 1)), sf.assignment(6)
        lap = sf.build_laplacian(graph, tau)
        rng = np.random.default_rng(11)
        samples = rng.uniform(-5, 5, size=(1000, 12))
        quad = np.einsum("ki,ij,kj->k", samples, lap.matrix, samples)
        residual_sq = ((samples @ lap.incidence.matrix) ** 2).sum(axis=1)
        assert quad.min() >= -1e-12
        assert np.allclose(quad, residual_sq, atol=1e-10)


class TestSpectrum:
    def test_square_eigenvalues_frozen(self):
        # closed forms: 0, 2 - sqrt(2), 2, 2 + sqrt(2), each twice
        graph, tau = sf.cycle_minus_edge(4, (4, 1)), sf.assignment(4)
        spec = sf.spectrum(sf.build_laplacian(graph, tau).matrix)
        expected = np.sort(np.array([0.0, 0.0, 2 - math.sqrt(2), 2 - math.sqrt(2),
                                     2.0, 2.0, 2 + math.sqrt(2), 2 + math.sqrt(2)]))
        assert np.allclose(spec.eigenvalues, expected, atol=1e-12)

    @pytest.mark.parametrize("n", range(3, 11))
    def test_rank_and_closed_form_spectrum(self, n, path_system):
        _, _, lap, _, _ = path_system(n)
        spec = sf.spectrum(lap.matrix)
        assert spec.rank == 2 * n - 2
        assert spec.null_dim == 2
        assert np.allclose(spec.eigenvalues, path_eigenvalues(n, 2), atol=1e-12)
        assert math.isclose(spec.lambda_min_pos, slowest_rate(n), rel_tol=1e-12)

    @pytest.mark.parametrize("n", (3, 6, 9))
    def test_svd_cross_route(self, n, path_system):
        # independent decomposition: squared singular values of the incidence
        _, _, lap, _, _ = path_system(n)
        svals = np.linalg.svd(lap.incidence.matrix, compute_uv=False)
        nonzero = np.sort(svals ** 2)
        spec = sf.spectrum(lap.matrix)
        assert np.allclose(np.sort(spec.eigenvalues)[2:], nonzero, atol=1e-12)

    def test_asymmetric_matrix_rejected(self):
        q = np.eye(4)
        q[0, 1] = 1e-6
        with pytest.raises(ValueError, match="asymmetry"):
            sf.spectrum(q)

    def test_bad_tolerance_rejected(self):
        with pytest.raises(ValueError):
            sf.spectrum(np.eye(2), tol=0.0)


class TestNullBasis:
    def test_columns_orthogonal_with_norm_n(self, path_system):
        for n in (3, 5, 8):
            _, _, _, basis, _ = path_system(n)
            assert np.allclose(basis.v0.T @ basis.v0, n * np.eye(2), atol=1e-12)
            normalized = basis.normalized
            assert np.allclose(normalized.T @ normalized, np.eye(2), atol=1e-12)

    def test_annihilated_by_laplacian(self, path_system):
        for n in (3, 6, 10):
            _, _, lap, basis, _ = path_system(n)
            assert np.abs(lap.matrix @ basis.v0).max() <= 1e-10

    def test_projection_idempotent(self, path_system):
        _, _, _, basis, _ = path_system(6)
        rng = np.random.default_rng(5)
        p = rng.uniform(-3, 3, 12)
        once = basis.project(p)
        assert np.allclose(basis.project(once), once, atol=1e-12)

    def test_rotated_basis_stays_in_null_space(self, path_system):
        # a globally rotated symmetric formation is still symmetric (planar case)
        _, _, lap, basis, _ = path_system(5)
        rng = np.random.default_rng(9)
        for _ in range(10):
            r = sf.rotation2(rng.uniform(-math.pi, math.pi)).matrix
            q_seed = rng.uniform(-2, 2, 2)
            rotated = np.kron(np.eye(5), r) @ basis.v0 @ q_seed
            assert np.abs(lap.matrix @ rotated).max() <= 1e-10


class TestSteadyState:
    def test_single_excited_agent_frozen(self, path_system):
        # start with agent 1 at (1,0), everyone else at the origin
        _, _, _, basis, _ = path_system(4)
        p0 = np.zeros(8)
        p0[0] = 1.0
        limit = sf.steady_state(p0, basis)
        expected = np.array([0.25, 0.0, 0.0, 0.25, -0.25, 0.0, 0.0, -0.25])
        assert np.allclose(limit, expected, atol=1e-15)

    @given(st.integers(3, 10), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_per_agent_route_agrees(self, n, seed):
        tau = sf.assignment(n)
        graph = sf.cycle_minus_edge(n, (n, 1))
        basis = sf.null_basis(graph, tau)
        chain = sf.rotation_chain(graph, tau).matrices()
        p0 = np.random.default_rng(seed).uniform(-4, 4, 2 * n)
        assert np.allclose(sf.steady_state(p0, basis),
                           sf.steady_state_per_agent(p0, chain), atol=1e-12)

    def test_shape_mismatch_rejected(self, path_system):
        _, _, _, basis, _ = path_system(4)
        with pytest.raises(ValueError, match="shape"):
            sf.steady_state(np.zeros(6), basis)


class TestClosedFormSolution:
    def test_time_zero_returns_start(self, path_system):
        _, _, lap, _, _ = path_system(5)
        p0 = np.random.default_rng(2).uniform(-2, 2, 10)
        assert np.allclose(sf.closed_form_solution(lap.matrix, p0, 0.0), p0, atol=1e-12)

    def test_long_horizon_converges_to_projection(self, path_system):
        _, _, lap, basis, _ = path_system(6)
        p0 = np.random.default_rng(4).uniform(-2, 2, 12)
        far = sf.closed_form_solution(lap.matrix, p0, 1e6)
        assert np.allclose(far, basis.project(p0), atol=1e-9)

    def test_eigenvector_decays_at_its_rate(self, path_system):
        _, _, lap, _, _ = path_system(4)
        spec = sf.spectrum(lap.matrix)
        lam = spec.eigenvalues[spec.null_dim]
        v = spec.eigenvectors[:, spec.null_dim]
        t = 1.7
        assert np.allclose(sf.closed_form_solution(lap.matrix, v, t, spec=spec),
                           math.exp(-lam * t) * v, atol=1e-12)

    def test_negative_time_rejected(self, path_system):
        _, _, lap, _, _ = path_system(4)
        with pytest.raises(ValueError):
            sf.closed_form_solution(lap.matrix, np.zeros(8), -1.0)


class TestSymmetricConfiguration:
    def test_zero_errors_at_target(self, path_system):
        graph, tau, lap, _, chain = path_system(7)
        p = sf.symmetric_configuration(chain, np.array([2.0, 0.5]))
        assert sf.edge_errors(p, graph, tau).max() < 1e-14
        assert np.abs(lap.matrix @ p).max() < 1e-13
