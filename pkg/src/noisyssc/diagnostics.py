"""Quantities that enter the recovery conditions of noisy SSC.

Inradius of the symmetrized hull of a cluster, restricted eigenvalue,
the admissible regularization interval, and checks of the separation and
noise-level conditions on concrete instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .datagen import noise_level
from .errors import BudgetExceeded, DegenerateInput, InvalidParameter
from .geometry import DEFAULT_RANK_TOL, Subspace, angular_distance, orthonormal_basis
from .solvers import nonzero_mask

MAX_INRADIUS_DIM = 5
MAX_INRADIUS_POINTS = 30


@dataclass
class DiagnosticsReport:
    inradii: list
    restricted_eigenvalues: list
    lambda_interval: tuple | None  # None when empty
    separation_ok: bool
    noise_ok: bool
    mu_eps: float
    xi: float
    d: int

    def to_dict(self):
        return dict(inradii=list(map(float, self.inradii)),
                    restricted_eigenvalues=list(map(float, self.restricted_eigenvalues)),
                    lambda_interval=None if self.lambda_interval is None
                    else [float(v) for v in self.lambda_interval],
                    separation_ok=bool(self.separation_ok), noise_ok=bool(self.noise_ok),
                    mu_eps=float(self.mu_eps), xi=float(self.xi), d=int(self.d))


def _coordinates(points, d=None, rank_tol=DEFAULT_RANK_TOL):
    P = np.asarray(points, dtype=float)
    if P.ndim != 2:
        raise InvalidParameter("points must be a matrix with points as columns")
    S = orthonormal_basis(P, rank_tol)
    if d is not None and S.intrinsic_dim != d:
        raise DegenerateInput(f"points span {S.intrinsic_dim} dimensions, expected {d}")
    return S.basis.T @ P


def _symmetric_hull_inradius(Z):
    # Z: d x m coordinates spanning R^d
    d = Z.shape[0]
    if d == 1:
        return float(np.abs(Z).max())
    pts = np.hstack([Z, -Z]).T
    try:
        hull = ConvexHull(pts)
    except QhullError as err:
        raise DegenerateInput(f"convex hull failed: {err}") from err
    # equations are [unit normal, offset] with normal . x + offset <= 0 inside
    return float(np.min(-hull.equations[:, -1]))


def inradius(points, leave_out=None, rank_tol=DEFAULT_RANK_TOL):
    """Radius of the largest ball in ``conv(+-points)`` within the points' span.

    ``leave_out`` drops one column first; the remaining points must still span
    the same dimension. Computed from the facets of the symmetric hull, which
    are the vertices of the polar polytope ``{u : |X^T u| <= 1}``.
    """
    P = np.asarray(points, dtype=float)
    d = orthonormal_basis(P, rank_tol).intrinsic_dim
    if d > MAX_INRADIUS_DIM or P.shape[1] > MAX_INRADIUS_POINTS:
        raise BudgetExceeded(
            f"inradius limited to d <= {MAX_INRADIUS_DIM} and <= {MAX_INRADIUS_POINTS} points")
    if leave_out is not None:
        if not 0 <= leave_out < P.shape[1]:
            raise InvalidParameter(f"leave_out {leave_out} out of range")
        P = np.delete(P, leave_out, axis=1)
    return _symmetric_hull_inradius(_coordinates(P, d, rank_tol))


def cluster_inradius(points, rank_tol=DEFAULT_RANK_TOL):
    """Smallest leave-one-out inradius over the points of one cluster."""
    P = np.asarray(points, dtype=float)
    return min(inradius(P, i, rank_tol) for i in range(P.shape[1]))


def restricted_eigenvalue(cluster_points, d, budget=1_000_000):
    """Minimum over all d-point subsets of the d-th singular value."""
    P = np.asarray(cluster_points, dtype=float)
    m = P.shape[1]
    if not 1 <= d <= m:
        raise InvalidParameter(f"need 1 <= d <= {m}, got {d}")
    total = math.comb(m, d)
    if total > budget:
        raise BudgetExceeded(f"{total} subsets exceed the budget of {budget}")
    best = np.inf
    combos = itertools.combinations(range(m), d)
    chunk = 20_000
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        sv = np.linalg.svd(P[:, block].transpose(1, 0, 2), compute_uv=False)
        best = min(best, float(sv[:, d - 1].min()))
    return best


def lambda_range(xi, rho, sigma):
    """Interval of regularization values for which recovery is guaranteed.

    Lower end ``max 2 xi (1 + xi)^2 (1 + 1/rho)``, upper end ``min rho sigma / 2``.
    Returns None when the interval is empty.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    if rho.shape != sigma.shape or rho.size == 0:
        raise InvalidParameter("rho and sigma need one entry per cluster")
    if np.any((rho <= 0) | (rho >= 1)) or np.any(sigma <= 0) or xi < 0:
        raise InvalidParameter("need 0 < rho < 1, sigma > 0 and xi >= 0")
    low = float(np.max(2 * xi * (1 + xi) ** 2 * (1 + 1 / rho)))
    high = float(np.min(rho * sigma / 2))
    return (low, high) if low < high else None


def check_theorem2_conditions(X, E, labels, d, rank_tol=DEFAULT_RANK_TOL,
                              budget=1_000_000) -> DiagnosticsReport:
    """Evaluate the noisy recovery conditions on ``(X, E)`` with known labels.

    ``X`` holds the clean points; ``xi`` is the largest column norm of ``E``.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    xi = noise_level(E)
    groups = sorted(set(labels.tolist()))
    rho, sigma, subs = [], [], []
    for g in groups:
        P = X[:, labels == g]
        S = orthonormal_basis(P, rank_tol)
        if S.intrinsic_dim != d:
            raise DegenerateInput(f"cluster {g} spans {S.intrinsic_dim} dimensions, not {d}")
        subs.append(S)
        rho.append(cluster_inradius(P, rank_tol))
        sigma.append(restricted_eigenvalue(P, d, budget))
    rho_a, sigma_a = np.array(rho), np.array(sigma)
    min_sigma = float(sigma_a.min())
    interval = (lambda_range(xi, rho_a, sigma_a)
                if np.all((rho_a > 0) & (rho_a < 1)) and min_sigma > 0 else None)
    if min_sigma > 0:
        need = 8 * d * xi ** 2 / min_sigma ** 2
        separation_ok = all(angular_distance(a, b) > need
                            for a, b in itertools.combinations(subs, 2))
        noise_ok = bool(xi < min(1.0, float(np.min(rho_a ** 2 * sigma_a / (16 * (1 + rho_a))))))
        mu_eps = math.sqrt(2 * d * xi ** 2 / min_sigma ** 2)
    else:
        separation_ok, noise_ok, mu_eps = False, False, math.inf
    return DiagnosticsReport(rho, sigma, interval, separation_ok, noise_ok, mu_eps, xi, d)


def verify_support_bound(coeffs, d, rel=1e-6):
    """Per column: does the solution use at least ``d`` atoms?"""
    C = np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=float)
    return nonzero_mask(C, rel).sum(axis=0) >= d


def dual_direction_check(u, cluster_points, leave_out=None, rank_tol=DEFAULT_RANK_TOL):
    """Does some remaining point correlate with unit ``u`` at least as much as the inradius?"""
    u = np.asarray(u, dtype=float).ravel()
    P = np.asarray(cluster_points, dtype=float)
    if abs(np.linalg.norm(u) - 1) > 1e-10:
        raise InvalidParameter("u must be a unit vector")
    S = orthonormal_basis(P, rank_tol)
    if float(S.residual(u[:, None])[0]) > 1e-8:
        raise InvalidParameter("u does not lie in the span of the cluster")
    rest = P if leave_out is None else np.delete(P, leave_out, axis=1)
    return bool(np.max(np.abs(u @ rest)) >= inradius(P, leave_out, rank_tol) - 1e-10)
