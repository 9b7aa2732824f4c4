import numpy as np
import pytest

from hashinfer.core import DimensionError, NotPSDError, SymmetricMatrix
from hashinfer.linalg import (
    cholesky_psd,
    eig_sym,
    largest_eigenvalue,
    pca_project,
    smallest_eigenvector,
)


def _rand_sym(rng, n):
    m = rng.standard_normal((n, n))
    return SymmetricMatrix((m + m.T) / 2)


class TestEigSym:
    def test_diagonal_fixture(self):
        dec = eig_sym(np.diag([1.0, 5.0, -2.0]))
        np.testing.assert_array_equal(dec.eigenvalues, [5.0, 1.0, -2.0])
        np.testing.assert_array_equal(dec.eigenvectors,
                                      np.eye(3)[:, [1, 0, 2]])

    def test_values_match_lapack(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 4, 8, 20):
            a = _rand_sym(rng, n)
            dec = eig_sym(a)
            np.testing.assert_allclose(dec.eigenvalues,
                                       np.linalg.eigvalsh(a.data)[::-1],
                                       rtol=1e-10, atol=1e-10)

    def test_descending_order(self):
        rng = np.random.default_rng(1)
        dec = eig_sym(_rand_sym(rng, 10))
        assert np.all(np.diff(dec.eigenvalues) <= 0)

    def test_reconstruction(self):
        rng = np.random.default_rng(2)
        a = _rand_sym(rng, 9)
        dec = eig_sym(a)
        recon = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.T
        np.testing.assert_allclose(recon, a.data, atol=1e-11)

    def test_orthonormal_vectors(self):
        rng = np.random.default_rng(3)
        dec = eig_sym(_rand_sym(rng, 11))
        np.testing.assert_allclose(dec.eigenvectors.T @ dec.eigenvectors,
                                   np.eye(11), atol=1e-12)

    def test_sign_convention(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            dec = eig_sym(_rand_sym(rng, 7))
            for k in range(7):
                col = dec.eigenvectors[:, k]
                assert col[np.argmax(np.abs(col))] > 0

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        a = _rand_sym(rng, 8)
        d1 = eig_sym(a)
        d2 = eig_sym(a)
        np.testing.assert_array_equal(d1.eigenvalues, d2.eigenvalues)
        np.testing.assert_array_equal(d1.eigenvectors, d2.eigenvectors)


class TestExtremePairs:
    def test_largest(self):
        rng = np.random.default_rng(6)
        a = _rand_sym(rng, 10)
        lam, u = largest_eigenvalue(a)
        np.testing.assert_allclose(lam, np.linalg.eigvalsh(a.data)[-1], rtol=1e-10)
        np.testing.assert_allclose(a.data @ u, lam * u, atol=1e-9)

    def test_smallest(self):
        rng = np.random.default_rng(7)
        a = _rand_sym(rng, 10)
        lam, u = smallest_eigenvector(a)
        np.testing.assert_allclose(lam, np.linalg.eigvalsh(a.data)[0], rtol=1e-10)
        np.testing.assert_allclose(a.data @ u, lam * u, atol=1e-9)
        np.testing.assert_allclose(np.linalg.norm(u), 1.0, rtol=1e-12)


class TestCholeskyPSD:
    def test_identity_no_jitter(self):
        f = cholesky_psd(np.eye(4))
        assert f.jitter == 0.0
        np.testing.assert_array_equal(f.lower, np.eye(4))

    def test_positive_definite_reconstructs(self):
        rng = np.random.default_rng(8)
        g = rng.standard_normal((6, 6))
        a = g @ g.T + 0.5 * np.eye(6)
        f = cholesky_psd(a)
        assert f.jitter == 0.0
        np.testing.assert_allclose(f.lower @ f.lower.T, a, atol=1e-10)

    def test_rank_deficient_needs_small_jitter(self):
        v = np.ones((5, 1))
        a = v @ v.T
        f = cholesky_psd(a)
        assert f.jitter <= 1e-6
        np.testing.assert_allclose(f.lower @ f.lower.T, a, atol=1e-5)

    def test_negative_definite_raises(self):
        with pytest.raises(NotPSDError):
            cholesky_psd(-np.eye(3))

    def test_lower_triangular(self):
        rng = np.random.default_rng(9)
        g = rng.standard_normal((5, 5))
        f = cholesky_psd(g @ g.T + np.eye(5))
        assert np.abs(np.triu(f.lower, 1)).max() == 0.0


class TestPCAProject:
    def test_scores_match_svd_oracle(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((5, 12))
        centered = x - x.mean(axis=1, keepdims=True)
        u, s, vt = np.linalg.svd(centered, full_matrices=False)
        ref = (u.T @ centered)[:3]
        got = pca_project(x, 3).data
        np.testing.assert_allclose(np.abs(got), np.abs(ref), atol=1e-8)

    def test_gram_route_matches_scatter_route(self):
        # D > n takes the Gram path; compare against the scatter path oracle
        rng = np.random.default_rng(11)
        x = rng.standard_normal((20, 8))
        centered = x - x.mean(axis=1, keepdims=True)
        u, s, vt = np.linalg.svd(centered, full_matrices=False)
        ref = (u.T @ centered)[:4]
        got = pca_project(x, 4).data
        np.testing.assert_allclose(np.abs(got), np.abs(ref), atol=1e-8)

    def test_scores_uncorrelated(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((6, 40))
        scores = pca_project(x, 4).data
        cov = scores @ scores.T
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() < 1e-8 * np.abs(np.diag(cov)).max()

    def test_variance_descending(self):
        rng = np.random.default_rng(13)
        x = rng.standard_normal((7, 30))
        scores = pca_project(x, 5).data
        var = (scores ** 2).sum(axis=1)
        assert np.all(np.diff(var) <= 1e-9)

    def test_k_out_of_range(self):
        x = np.ones((3, 5))
        with pytest.raises(DimensionError):
            pca_project(x, 4)
        with pytest.raises(DimensionError):
            pca_project(x, 0)

    def test_scores_are_centered(self):
        rng = np.random.default_rng(14)
        x = rng.standard_normal((4, 25)) + 3.0
        scores = pca_project(x, 2).data
        np.testing.assert_allclose(scores.mean(axis=1), 0.0, atol=1e-10)
