"""Truncated SVD, tangent-space projection, and the structured rank-r update.

The rank-r manifold's tangent space at L = U diag(sigma) V^T admits a cheap
projection: with

    (Q1, R1) = QR((I - U U^T) A V)        (d1 x r)
    (Q2, R2) = QR((I - V V^T) A^T U)      (d2 x r)

the projection of A factors as

    P_T(A) = [U Q1] @ [[U^T A V, R2^T], [R1, 0]] @ [V Q2]^T

so the subsequent best rank-r approximation only needs the SVD of the
2r x 2r middle block instead of a full d1 x d2 SVD.  That small-core path
is what `structured_rank_projection` implements; it must agree with
truncating the densely assembled projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Shapes of operands are incompatible."""


def ensure_matrix(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array with finite entries."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


@dataclass
class RankRBasis:
    """Top-r singular triplets: U (d1 x r), sigma (r,), V (d2 x r).

    U and V have orthonormal columns; sigma is nonnegative and sorted
    non-increasing.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def r(self) -> int:
        return self.sigma.shape[0]

    def to_matrix(self) -> np.ndarray:
        """Reconstruct U diag(sigma) V^T."""
        return (self.U * self.sigma) @ self.V.T


@dataclass
class TangentFactors:
    """QR factors and 2r x 2r core of the factored tangent projection.

    Q1 (d1 x r) spans the part of col(A V) orthogonal to U, Q2 (d2 x r)
    the part of col(A^T U) orthogonal to V; R1, R2 are the r x r upper
    triangular companions, and `core` is [[U^T A V, R2^T], [R1, 0]].
    """

    Q1: np.ndarray
    R1: np.ndarray
    Q2: np.ndarray
    R2: np.ndarray
    core: np.ndarray


def truncated_svd(A: np.ndarray, r: int) -> RankRBasis:
    """Top-r singular triplets of A (best rank-r approximation).

    Backed by a full SVD, which is fine at the matrix sizes this library
    targets; the solver's inner loop never calls this, it uses the 2r x 2r
    core path instead.
    """
    A = ensure_matrix(A)
    _check_rank(A.shape, r)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return RankRBasis(U=U[:, :r].copy(), sigma=s[:r].copy(), V=Vt[:r].T.copy())


def rank_projection(A: np.ndarray, r: int) -> np.ndarray:
    """Best rank-r approximation of A in Frobenius norm."""
    return truncated_svd(A, r).to_matrix()


def singular_values(A: np.ndarray, upto: int) -> np.ndarray:
    """First `upto` singular values of A, non-increasing."""
    A = ensure_matrix(A)
    _check_rank(A.shape, upto, what="upto")
    return np.linalg.svd(A, compute_uv=False)[:upto]


def tangent_factors(A: np.ndarray, basis: RankRBasis) -> TangentFactors:
    """QR factors and core block of the tangent-space projection of A."""
    U, V = basis.U, basis.V
    if A.shape != (U.shape[0], V.shape[0]):
        raise DimensionError(
            f"matrix of shape {A.shape} does not match basis "
            f"({U.shape[0]}x{V.shape[0]})"
        )
    AV = A @ V
    AtU = A.T @ U
    UtAV = U.T @ AV
    Q1, R1 = np.linalg.qr(AV - U @ UtAV)
    Q2, R2 = np.linalg.qr(AtU - V @ UtAV.T)
    r = basis.r
    core = np.zeros((2 * r, 2 * r))
    core[:r, :r] = UtAV
    core[:r, r:] = R2.T
    core[r:, :r] = R1
    return TangentFactors(Q1=Q1, R1=R1, Q2=Q2, R2=R2, core=core)


def tangent_projection(
    A: np.ndarray, basis: RankRBasis
) -> tuple[np.ndarray, TangentFactors]:
    """Project A onto the tangent space at the rank-r basis.

    Returns the assembled projection together with its factors; the
    assembly equals the dense projector U U^T A + A V V^T - U U^T A V V^T.
    """
    f = tangent_factors(A, basis)
    left = np.hstack([basis.U, f.Q1])
    right = np.hstack([basis.V, f.Q2])
    return left @ f.core @ right.T, f


def structured_rank_projection(
    factors: TangentFactors, basis: RankRBasis, r: int
) -> RankRBasis:
    """Best rank-r approximation of the projected matrix, via the small core.

    SVDs only the 2r x 2r core and rotates the top-r triplets back into
    [U Q1] and [V Q2]; singular values match the dense
    rank_projection(tangent_projection(...)) path exactly.
    """
    if factors.core.shape != (2 * basis.r, 2 * basis.r):
        raise DimensionError(
            f"core shape {factors.core.shape} inconsistent with basis rank {basis.r}"
        )
    if r > basis.r:
        raise DimensionError(f"requested rank {r} exceeds basis rank {basis.r}")
    Uc, sc, Vct = np.linalg.svd(factors.core)
    left = np.hstack([basis.U, factors.Q1])
    right = np.hstack([basis.V, factors.Q2])
    return RankRBasis(
        U=left @ Uc[:, :r],
        sigma=sc[:r].copy(),
        V=right @ Vct[:r].T,
    )


def _check_rank(shape, r, what: str = "r"):
    if r < 1:
        raise DimensionError(f"{what} must be a positive integer, got {r}")
    if r > min(shape):
        raise DimensionError(f"{what}={r} exceeds min(shape)={min(shape)}")
