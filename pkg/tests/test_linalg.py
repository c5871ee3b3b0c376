import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsinkhorn import linalg
from opsinkhorn.errors import DomainError, InvalidInputError, SingularityError

import oracles


def random_hermitian(d, rng, scale=1.0):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2 * scale


def random_pd(d, rng, shift=0.1):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return g @ g.conj().T / d + shift * np.eye(d)


class TestHermEig:
    def test_diagonal_matrix(self):
        w, v = linalg.herm_eig(np.diag([1.0, 2.0]))
        np.testing.assert_allclose(w, [1.0, 2.0])
        np.testing.assert_allclose(np.abs(v), np.eye(2), atol=1e-14)

    def test_symmetric_two_by_two(self):
        w, _ = linalg.herm_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-12)

    def test_pauli_y(self):
        w, _ = linalg.herm_eig(np.array([[0.0, 1j], [-1j, 0.0]]))
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-12)

    def test_reconstruction_and_unitarity(self):
        rng = np.random.default_rng(0)
        a = random_hermitian(5, rng)
        dec = linalg.herm_eig(a)
        res = np.linalg.norm(dec.reconstruct() - a)
        assert res <= 1e-10 * (1.0 + np.linalg.norm(a))
        p = dec.eigenvectors
        assert np.linalg.norm(p.conj().T @ p - np.eye(5)) <= 1e-10
        assert np.all(np.diff(dec.eigenvalues) >= 0)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            linalg.herm_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInputError):
            linalg.herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMatrixFunction:
    def test_sqrt_diagonal(self):
        np.testing.assert_allclose(linalg.sqrtm(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_log_inverts_exp(self):
        a = np.diag([1.0, 2.0])
        np.testing.assert_allclose(linalg.logm(linalg.expm(a)), a, atol=1e-12)

    def test_half_power_squares_back(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        s = linalg.powm(a, 0.5)
        assert np.linalg.norm(s @ s - a) <= 1e-10

    @pytest.mark.parametrize("name,f", [("sqrt", np.sqrt), ("exp", np.exp), ("log", np.log)])
    def test_spectral_mapping(self, name, f):
        rng = np.random.default_rng(1)
        a = random_pd(4, rng)
        out = linalg.matrix_function(a, name)
        expected = np.sort(f(np.linalg.eigvalsh(a)))
        np.testing.assert_allclose(np.linalg.eigvalsh(out), expected, atol=1e-10)

    def test_sqrt_domain_error_names_eigenvalue(self):
        with pytest.raises(DomainError, match="-1"):
            linalg.sqrtm(np.diag([1.0, -1.0]))

    def test_log_rejects_singular(self):
        with pytest.raises(DomainError):
            linalg.logm(np.diag([1.0, 0.0]))

    def test_negative_power_rejects_singular(self):
        with pytest.raises(DomainError):
            linalg.powm(np.diag([1.0, 0.0]), -0.5)

    def test_unknown_tag(self):
        with pytest.raises(InvalidInputError):
            linalg.matrix_function(np.eye(2), "sinh")


class TestSolveLyapunov:
    def test_identity_coefficient(self):
        rng = np.random.default_rng(2)
        q = random_hermitian(3, rng)
        np.testing.assert_allclose(linalg.solve_lyapunov(np.eye(3), q), q / 2, atol=1e-12)

    def test_diagonal_known_solution(self):
        x = linalg.solve_lyapunov(np.diag([1.0, 2.0]), np.ones((2, 2)))
        np.testing.assert_allclose(x, [[0.5, 1.0 / 3.0], [1.0 / 3.0, 0.25]], atol=1e-12)

    def test_residual_bound(self):
        rng = np.random.default_rng(3)
        a = random_pd(4, rng)
        q = random_hermitian(4, rng)
        x = linalg.solve_lyapunov(a, q)
        assert np.linalg.norm(a @ x + x @ a - q) <= 1e-10 * (1.0 + np.linalg.norm(q))

    def test_matches_quadrature(self):
        rng = np.random.default_rng(4)
        a = random_pd(3, rng)
        q = random_hermitian(3, rng)
        x = linalg.solve_lyapunov(a, q)
        np.testing.assert_allclose(x, oracles.lyapunov_quadrature(a, q), atol=1e-6)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_matches_vectorized_solve(self, dim):
        rng = np.random.default_rng(dim)
        a = random_pd(dim, rng)
        q = random_hermitian(dim, rng)
        x = linalg.solve_lyapunov(a, q)
        np.testing.assert_allclose(x, oracles.lyapunov_vectorized(a, q), atol=1e-9)

    def test_rejects_indefinite_coefficient(self):
        with pytest.raises(SingularityError):
            linalg.solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))


class TestGeometricMean:
    def test_idempotent(self):
        rng = np.random.default_rng(5)
        a = random_pd(3, rng)
        np.testing.assert_allclose(linalg.geometric_mean(a, a), a, atol=1e-11)

    def test_identity_left(self):
        rng = np.random.default_rng(6)
        b = random_pd(3, rng)
        np.testing.assert_allclose(linalg.geometric_mean(np.eye(3), b), linalg.sqrtm(b), atol=1e-11)

    def test_commuting_diagonal(self):
        out = linalg.geometric_mean(np.diag([1.0, 4.0]), np.diag([4.0, 1.0]))
        np.testing.assert_allclose(out, np.diag([2.0, 2.0]), atol=1e-12)

    def test_riccati_residual(self):
        rng = np.random.default_rng(7)
        a, b = random_pd(4, rng), random_pd(4, rng)
        x = linalg.geometric_mean(a, b)
        res = np.linalg.norm(x @ linalg.invm(a) @ x - b)
        assert res <= 1e-9 * (1.0 + np.linalg.norm(b))

    @pytest.mark.parametrize("seed", range(5))
    def test_symmetric_in_arguments(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_pd(3, rng), random_pd(3, rng)
        ab = linalg.geometric_mean(a, b)
        ba = linalg.geometric_mean(b, a)
        assert np.linalg.norm(ab - ba) <= 1e-9 * (1.0 + np.linalg.norm(ab))

    def test_rejects_indefinite(self):
        with pytest.raises(SingularityError):
            linalg.geometric_mean(np.diag([1.0, -1.0]), np.eye(2))


class TestKronAndPartialTrace:
    def test_kron_identities(self):
        np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_kron_block_layout(self):
        e11 = np.zeros((2, 2))
        e11[0, 0] = 1.0
        b = np.arange(4.0).reshape(2, 2)
        out = linalg.kron(e11, b)
        np.testing.assert_array_equal(out[:2, :2], b)
        assert np.all(out[2:, :] == 0) and np.all(out[:, 2:] == 0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_kron_mixed_product(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
        lhs = linalg.kron(a, b) @ linalg.kron(c, d)
        rhs = linalg.kron(a @ c, b @ d)
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())

    def test_partial_traces_of_product(self):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        prod = linalg.kron(a, b)
        np.testing.assert_allclose(linalg.partial_trace(prod, 3, 2, "first"), np.trace(a) * b, atol=1e-12)
        np.testing.assert_allclose(linalg.partial_trace(prod, 3, 2, "second"), np.trace(b) * a, atol=1e-12)

    def test_partial_traces_preserve_total_trace(self):
        rng = np.random.default_rng(9)
        mat = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        t = np.trace(mat)
        for which, n, m in [("first", 3, 2), ("second", 3, 2)]:
            np.testing.assert_allclose(np.trace(linalg.partial_trace(mat, n, m, which)), t, atol=1e-12)

    def test_partial_trace_linear(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((4, 4))
        y = rng.standard_normal((4, 4))
        lhs = linalg.partial_trace(2.0 * x + 3.0 * y, 2, 2, "first")
        rhs = 2.0 * linalg.partial_trace(x, 2, 2, "first") + 3.0 * linalg.partial_trace(y, 2, 2, "first")
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_partial_trace_dimension_check(self):
        with pytest.raises(InvalidInputError):
            linalg.partial_trace(np.eye(5), 2, 2, "first")
        with pytest.raises(InvalidInputError):
            linalg.partial_trace(np.eye(4), 2, 2, "third")


class TestHermitianBasis:
    @pytest.mark.parametrize("d", [2, 3])
    def test_orthonormal_and_complete(self, d):
        basis = linalg.hermitian_basis(d)
        assert len(basis) == d * d
        gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
        np.testing.assert_allclose(gram, np.eye(d * d), atol=1e-14)
        for b in basis:
            np.testing.assert_allclose(b, b.conj().T, atol=0)
