import numpy as np
import pytest

from unrolled_rpca.linalg import (
    DimensionError,
    rank_projection,
    singular_values,
    structured_rank_projection,
    tangent_factors,
    tangent_projection,
    truncated_svd,
)


def random_basis(rng, d1, d2, r):
    """Orthonormal rank-r basis from a random matrix's top triplets."""
    return truncated_svd(rng.standard_normal((d1, d2)), r)


def dense_tangent_projector(A, basis):
    """Independent oracle: P(A) = U U^T A + A V V^T - U U^T A V V^T."""
    U, V = basis.U, basis.V
    return U @ U.T @ A + A @ V @ V.T - U @ U.T @ A @ V @ V.T


def test_truncated_svd_diagonal():
    b = truncated_svd(np.diag([3.0, 1.0]), 1)
    np.testing.assert_allclose(b.sigma, [3.0])
    np.testing.assert_allclose(b.to_matrix(), np.diag([3.0, 0.0]), atol=1e-12)


def test_truncated_svd_degenerate_spectrum():
    b = truncated_svd(np.eye(2), 1)
    np.testing.assert_allclose(b.sigma, [1.0])


def test_truncated_svd_matches_full_svd_oracle():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 4))
    b = truncated_svd(A, 2)
    U, s, Vt = np.linalg.svd(A)
    oracle = U[:, :2] @ np.diag(s[:2]) @ Vt[:2]
    assert np.linalg.norm(b.to_matrix() - oracle) < 1e-10


def test_truncated_svd_orthonormal_columns():
    rng = np.random.default_rng(1)
    b = truncated_svd(rng.standard_normal((8, 6)), 3)
    np.testing.assert_allclose(b.U.T @ b.U, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(b.V.T @ b.V, np.eye(3), atol=1e-10)
    assert np.all(np.diff(b.sigma) <= 0) and np.all(b.sigma >= 0)


def test_truncated_svd_rank_out_of_range():
    with pytest.raises(DimensionError):
        truncated_svd(np.eye(3), 4)
    with pytest.raises(DimensionError):
        truncated_svd(np.eye(3), 0)


def test_rank_projection_fixed_point():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((6, 3)) @ rng.standard_normal((3, 6))
    assert np.linalg.norm(rank_projection(A, 3) - A) < 1e-10


def test_rank_projection_diagonal():
    np.testing.assert_allclose(
        rank_projection(np.diag([3.0, 1.0]), 1), np.diag([3.0, 0.0]), atol=1e-12
    )


def test_rank_projection_eckart_young_error():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 6))
    s = np.linalg.svd(A, compute_uv=False)
    err = np.linalg.norm(A - rank_projection(A, 3))
    assert err == pytest.approx(np.sqrt(np.sum(s[3:] ** 2)), abs=1e-10)


def test_rank_projection_beats_random_competitors():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((7, 5))
    best = np.linalg.norm(A - rank_projection(A, 2))
    for _ in range(20):
        competitor = rng.standard_normal((7, 2)) @ rng.standard_normal((2, 5))
        assert best <= np.linalg.norm(A - competitor) + 1e-12


def test_singular_values_sorted_pair():
    np.testing.assert_allclose(singular_values(np.diag([2.0, 5.0]), 2), [5.0, 2.0])


def test_singular_values_rank_deficient():
    u = np.arange(1.0, 5.0).reshape(-1, 1)
    assert singular_values(u @ u.T, 2)[1] <= 1e-10


def test_singular_values_matches_full_spectrum():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((8, 6))
    np.testing.assert_allclose(
        singular_values(A, 3), np.linalg.svd(A, compute_uv=False)[:3], atol=1e-12
    )


def test_tangent_projection_of_inhabitant_is_identity():
    # A = U B V^T lies in the tangent space, so projecting changes nothing
    rng = np.random.default_rng(6)
    basis = random_basis(rng, 7, 5, 2)
    A = basis.U @ rng.standard_normal((2, 2)) @ basis.V.T
    P, factors = tangent_projection(A, basis)
    assert np.linalg.norm(P - A) < 1e-10
    assert np.linalg.norm(factors.R1) < 1e-10
    assert np.linalg.norm(factors.R2) < 1e-10


def test_tangent_projection_of_zero():
    rng = np.random.default_rng(7)
    basis = random_basis(rng, 6, 5, 2)
    P, _ = tangent_projection(np.zeros((6, 5)), basis)
    np.testing.assert_allclose(P, np.zeros((6, 5)), atol=1e-12)


def test_tangent_projection_matches_dense_oracle():
    rng = np.random.default_rng(8)
    basis = random_basis(rng, 6, 5, 2)
    A = rng.standard_normal((6, 5))
    P, _ = tangent_projection(A, basis)
    assert np.linalg.norm(P - dense_tangent_projector(A, basis)) < 1e-10


def test_tangent_projection_idempotent():
    rng = np.random.default_rng(9)
    basis = random_basis(rng, 9, 7, 3)
    A = rng.standard_normal((9, 7))
    P1, _ = tangent_projection(A, basis)
    P2, _ = tangent_projection(P1, basis)
    assert np.linalg.norm(P2 - P1) < 1e-9


def test_tangent_projection_self_adjoint():
    rng = np.random.default_rng(10)
    basis = random_basis(rng, 8, 6, 2)
    A = rng.standard_normal((8, 6))
    B = rng.standard_normal((8, 6))
    PA, _ = tangent_projection(A, basis)
    PB, _ = tangent_projection(B, basis)
    assert np.sum(PA * B) == pytest.approx(np.sum(A * PB), abs=1e-9)


def test_tangent_factors_orthogonality_invariants():
    rng = np.random.default_rng(11)
    basis = random_basis(rng, 8, 6, 2)
    f = tangent_factors(rng.standard_normal((8, 6)), basis)
    assert np.linalg.norm(f.Q1.T @ basis.U) < 1e-10
    assert np.linalg.norm(f.Q2.T @ basis.V) < 1e-10
    assert np.linalg.norm(np.tril(f.R1, -1)) == 0.0
    assert np.linalg.norm(np.tril(f.R2, -1)) == 0.0


def test_tangent_projection_dimension_mismatch():
    rng = np.random.default_rng(12)
    basis = random_basis(rng, 6, 5, 2)
    with pytest.raises(DimensionError):
        tangent_projection(np.zeros((5, 6)), basis)


def test_structured_projection_matches_dense_path():
    rng = np.random.default_rng(13)
    for _ in range(25):
        d1, d2 = rng.integers(4, 21, size=2)
        r = int(rng.integers(1, min(d1, d2, 5)))
        basis = random_basis(rng, d1, d2, r)
        A = rng.standard_normal((d1, d2))
        P, factors = tangent_projection(A, basis)
        got = structured_rank_projection(factors, basis, r)
        want = rank_projection(P, r)
        assert np.linalg.norm(got.to_matrix() - want) < 1e-9
        np.testing.assert_allclose(
            got.sigma, np.linalg.svd(P, compute_uv=False)[:r], atol=1e-9
        )


def test_structured_projection_reproduces_tangent_inhabitant():
    # rank-r matrix already in the tangent space: its own triplets come back
    rng = np.random.default_rng(14)
    basis = random_basis(rng, 7, 6, 2)
    A = basis.to_matrix()
    P, factors = tangent_projection(A, basis)
    got = structured_rank_projection(factors, basis, 2)
    np.testing.assert_allclose(got.sigma, basis.sigma, atol=1e-10)
    assert np.linalg.norm(got.to_matrix() - A) < 1e-9


def test_structured_projection_zero_core():
    rng = np.random.default_rng(15)
    basis = random_basis(rng, 6, 5, 2)
    _, factors = tangent_projection(np.zeros((6, 5)), basis)
    got = structured_rank_projection(factors, basis, 2)
    np.testing.assert_allclose(got.sigma, [0.0, 0.0], atol=1e-12)


def test_structured_projection_inconsistent_factors():
    rng = np.random.default_rng(16)
    basis = random_basis(rng, 6, 5, 2)
    _, factors = tangent_projection(rng.standard_normal((6, 5)), basis)
    other = random_basis(rng, 6, 5, 3)
    with pytest.raises(DimensionError):
        structured_rank_projection(factors, other, 3)
