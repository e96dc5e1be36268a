import numpy as np
import pytest

from irsbeam.errors import SingularMatrix
from irsbeam.linalg import (
    cho_solve,
    cholesky,
    hermitian_eig,
    hermitian_eig_max,
    invert,
    matrix_rank,
)


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_invert_identity():
    np.testing.assert_allclose(invert(np.eye(3)), np.eye(3), atol=1e-14)


def test_invert_2x2_closed_form():
    a = np.array([[1, 1], [1, -1]], dtype=complex)
    expected = np.array([[0.5, 0.5], [0.5, -0.5]])
    np.testing.assert_allclose(invert(a), expected, atol=1e-14)


def test_invert_gram_trace():
    # adjugate/determinant by hand: det = 16, diagonal cofactors are 8 each
    g = np.array([[3, 1, 1], [1, 3, -1], [1, -1, 3]], dtype=complex)
    g_inv = invert(g)
    assert np.trace(g_inv).real == pytest.approx(1.5, rel=1e-12)
    np.testing.assert_allclose(g @ g_inv, np.eye(3), atol=1e-12)


def test_invert_residual_small():
    rng = np.random.default_rng(7)
    for n in (2, 5, 17, 33):
        a = random_matrix(rng, n)
        res = a @ invert(a) - np.eye(n)
        assert np.max(np.abs(res)) <= 1e-9


def test_invert_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = random_matrix(rng, 6)
        np.testing.assert_allclose(invert(invert(a)), a, atol=1e-7)


def test_invert_matches_numpy_oracle():
    rng = np.random.default_rng(3)
    a = random_matrix(rng, 9)
    np.testing.assert_allclose(invert(a), np.linalg.inv(a), atol=1e-10)


def test_invert_singular_raises():
    a = np.ones((3, 3), dtype=complex)
    with pytest.raises(SingularMatrix):
        invert(a)


def test_invert_rejects_nonsquare_and_nonfinite():
    with pytest.raises(ValueError):
        invert(np.ones((2, 3)))
    with pytest.raises(ValueError):
        invert(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_rank_identity():
    assert matrix_rank(np.eye(4), 1e-9) == 4


def test_rank_all_ones():
    assert matrix_rank(np.ones((3, 3)), 1e-9) == 1


def test_rank_hadamard4():
    h4 = np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=complex
    )
    assert matrix_rank(h4, 1e-9) == 4


def test_rank_row_permutation_invariant():
    rng = np.random.default_rng(5)
    a = random_matrix(rng, 6)
    a[3] = a[1] + a[2]  # force rank 5
    base = matrix_rank(a, 1e-9)
    assert base == 5
    for _ in range(10):
        perm = rng.permutation(6)
        assert matrix_rank(a[perm], 1e-9) == base


def test_rank_rectangular():
    a = np.array([[0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    assert matrix_rank(a, 1e-9) == 1


def test_eig_diagonal():
    lam, v = hermitian_eig_max(np.diag([1.0, 2.0, 3.0]))
    assert lam == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(np.abs(v), [0, 0, 1], atol=1e-10)


def test_eig_rank_one_projector():
    rng = np.random.default_rng(2)
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    v /= np.linalg.norm(v)
    lam, u = hermitian_eig_max(np.outer(v, v.conj()))
    assert lam == pytest.approx(1.0, abs=1e-10)
    # eigenvector matches up to global phase
    assert abs(np.vdot(u, v)) == pytest.approx(1.0, abs=1e-9)


def test_eig_2x2_closed_form():
    lam, v = hermitian_eig_max(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert lam == pytest.approx(3.0, abs=1e-12)
    expected = np.array([1.0, 1.0]) / np.sqrt(2)
    assert abs(np.vdot(v, expected)) == pytest.approx(1.0, abs=1e-9)


def test_eig_residual_and_rayleigh_maximality():
    rng = np.random.default_rng(9)
    for n in (3, 8, 21):
        a = random_matrix(rng, n)
        a = (a + a.conj().T) / 2
        lam, v = hermitian_eig_max(a)
        assert np.linalg.norm(a @ v - lam * v) <= 1e-8 * np.linalg.norm(a)
        for _ in range(100):
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            u /= np.linalg.norm(u)
            assert lam >= np.vdot(u, a @ u).real - 1e-9


def test_eig_full_decomposition_matches_numpy():
    rng = np.random.default_rng(13)
    a = random_matrix(rng, 12)
    a = (a + a.conj().T) / 2
    w, V = hermitian_eig(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-9)
    np.testing.assert_allclose(V @ np.diag(w) @ V.conj().T, a, atol=1e-9)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(12), atol=1e-10)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_cholesky_roundtrip_and_solve():
    rng = np.random.default_rng(21)
    a = random_matrix(rng, 7)
    a = a @ a.conj().T + np.eye(7)
    L = cholesky(a)
    np.testing.assert_allclose(L @ L.conj().T, a, atol=1e-9)
    b = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    np.testing.assert_allclose(a @ cho_solve(L, b), b, atol=1e-8)
    B = rng.standard_normal((7, 3)) + 1j * rng.standard_normal((7, 3))
    np.testing.assert_allclose(a @ cho_solve(L, B), B, atol=1e-8)


def test_cholesky_rejects_indefinite():
    with pytest.raises(SingularMatrix):
        cholesky(np.diag([1.0, -1.0]))
