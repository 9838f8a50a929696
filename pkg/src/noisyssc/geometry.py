"""Linear subspaces, principal angles and the perturbation bounds used by merging."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, InvalidParameter

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class Subspace:
    """A linear subspace stored through an orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        if basis.ndim != 2 or basis.shape[1] < 1 or basis.shape[1] > basis.shape[0]:
            raise InvalidParameter(f"basis must be n x d with 1 <= d <= n, got {basis.shape}")
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-10, rtol=0):
            raise InvalidParameter("basis columns are not orthonormal")
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def intrinsic_dim(self) -> int:
        return self.basis.shape[1]

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ v)

    def residual(self, v: np.ndarray) -> np.ndarray:
        """Norm of the component of ``v`` (vector or columns) orthogonal to the subspace."""
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(v - self.project(v), axis=0)

    def contains(self, v: np.ndarray, tol: float = 1e-8) -> bool:
        return bool(np.all(self.residual(v) <= tol * np.maximum(1.0, np.linalg.norm(v, axis=0))))


def _as_columns(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        A = points.astype(float)
        if A.ndim == 1:
            A = A[:, None]
        return A
    # list of n-vectors
    return np.column_stack([np.asarray(p, dtype=float) for p in points])


def orthonormal_basis(points, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Orthonormal basis of the numerical column space of ``points``.

    ``points`` is either an n x m array whose columns are points, or a list of
    n-vectors. Singular values above ``rank_tol`` times the largest one count
    toward the rank.
    """
    if rank_tol <= 0:
        raise InvalidParameter("rank_tol must be positive")
    A = _as_columns(points)
    if A.size == 0 or not np.any(A):
        raise DegenerateInput("cannot take the span of all-zero points")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0]))
    return Subspace(U[:, :rank])


def numerical_rank(A: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    A = _as_columns(A)
    if A.size == 0 or not np.any(A):
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > rank_tol * s[0]))


def _check_ambient(S: Subspace, T: Subspace):
    if S.ambient_dim != T.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {S.ambient_dim} vs {T.ambient_dim}")


def canonical_angles(S: Subspace, T: Subspace) -> np.ndarray:
    """Principal angles in radians, ascending, ``min(dim S, dim T)`` of them."""
    _check_ambient(S, T)
    cos = np.linalg.svd(S.basis.T @ T.basis, compute_uv=False)
    # float error can push cosines slightly above 1
    cos = np.clip(cos, 0.0, 1.0)
    return np.sort(np.arccos(cos))


def affinity(S: Subspace, T: Subspace) -> float:
    _check_ambient(S, T)
    return float(np.linalg.norm(S.basis.T @ T.basis, "fro"))


def angular_distance(S: Subspace, T: Subspace) -> float:
    """Sum of squared sines of the principal angles between equal-dimension subspaces.

    Computed as ``d - ||S^T T||_F^2`` and clipped into ``[0, d]``.
    """
    _check_ambient(S, T)
    d = S.intrinsic_dim
    if T.intrinsic_dim != d:
        raise DimensionMismatch(
            f"angular distance needs equal dimensions, got {d} and {T.intrinsic_dim}")
    value = d - affinity(S, T) ** 2
    return float(min(max(value, 0.0), d))


def wedin_subspace_bound(d: int, xi: float, sigma: float) -> float:
    """Upper bound ``2 d xi^2 / sigma^2`` on the angular distance between the span of
    d points and the span of the same points perturbed column-wise by at most ``xi``,
    where ``sigma`` lower-bounds the d-th singular value of the clean points."""
    if sigma <= 0:
        raise InvalidParameter("sigma must be positive")
    if d < 1 or xi < 0:
        raise InvalidParameter("need d >= 1 and xi >= 0")
    return 2.0 * d * xi ** 2 / sigma ** 2


def projection_residual(A: np.ndarray, i: int) -> float:
    """Distance from column ``i`` of ``A`` to the span of the remaining columns."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InvalidParameter("A must be a matrix")
    n, m = A.shape
    if not 0 <= i < m:
        raise InvalidParameter(f"column index {i} out of range for {m} columns")
    target = A[:, i]
    rest = np.delete(A, i, axis=1)
    if rest.shape[1] == 0 or not np.any(rest):
        return float(np.linalg.norm(target))
    Q = orthonormal_basis(rest, rank_tol=1e-12).basis
    return float(np.linalg.norm(target - Q @ (Q.T @ target)))
