"""Synthetic union-of-subspaces instances.

All generators are pure functions of their arguments; randomness flows through
``numpy.random.default_rng(seed)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, InvalidParameter
from .geometry import Subspace


@dataclass
class Dataset:
    X: np.ndarray
    Y: np.ndarray
    labels: np.ndarray
    true_subspaces: list
    meta: dict = field(default_factory=dict)

    @property
    def E(self) -> np.ndarray:
        return self.Y - self.X

    @property
    def xi(self) -> float:
        return noise_level(self.E)

    @property
    def n_points(self) -> int:
        return self.X.shape[1]


def noise_level(E) -> float:
    """Largest column norm of a perturbation matrix."""
    E = np.asarray(E, dtype=float)
    return float(np.linalg.norm(E, axis=0).max(initial=0.0))


def normalize_columns(M):
    M = np.asarray(M, dtype=float)
    norms = np.linalg.norm(M, axis=0)
    if np.any(norms == 0):
        raise DegenerateInput(f"zero column(s) at {np.flatnonzero(norms == 0).tolist()}")
    return M / norms


def random_orthonormal(n, d, rng):
    """Uniformly distributed n x d matrix with orthonormal columns."""
    Q, R = np.linalg.qr(rng.standard_normal((n, d)))
    # sign fix makes the distribution Haar rather than QR-biased
    return Q * np.sign(np.diag(R))


def add_noise(X, model="gaussian", sigma=0.0, E=None, seed=None):
    """Return ``(Y, xi)`` with ``Y = X + E`` and ``xi`` the largest noise column norm.

    ``model="gaussian"`` draws entries with variance ``sigma**2 / n``;
    ``model="adversarial"`` uses the supplied ``E`` as-is.
    """
    X = np.asarray(X, dtype=float)
    if model == "gaussian":
        if sigma < 0:
            raise InvalidParameter("sigma must be non-negative")
        rng = np.random.default_rng(seed)
        E = rng.standard_normal(X.shape) * (sigma / np.sqrt(X.shape[0]))
    elif model == "adversarial":
        if E is None:
            raise InvalidParameter("adversarial model needs an explicit E")
        E = np.asarray(E, dtype=float)
        if E.shape != X.shape:
            raise DimensionMismatch(f"E has shape {E.shape}, X has {X.shape}")
        if not np.all(np.isfinite(E)):
            raise InvalidParameter("E must be finite")
    else:
        raise InvalidParameter(f"unknown noise model {model!r}")
    return X + E, noise_level(E)


def gen_semirandom(n, d, L, points_per_cluster, seed=0):
    """L random d-dimensional subspaces of R^n, points uniform on each unit sphere."""
    if not 1 <= d < n:
        raise InvalidParameter(f"need 1 <= d < n, got d={d}, n={n}")
    if L < 1 or points_per_cluster < 1:
        raise InvalidParameter("need L >= 1 and at least one point per cluster")
    rng = np.random.default_rng(seed)
    blocks, subspaces = [], []
    for _ in range(L):
        U = random_orthonormal(n, d, rng)
        a = rng.standard_normal((d, points_per_cluster))
        a /= np.linalg.norm(a, axis=0)
        blocks.append(U @ a)
        subspaces.append(Subspace(U))
    X = np.hstack(blocks)
    labels = np.repeat(np.arange(1, L + 1), points_per_cluster)
    meta = dict(generator="semirandom", n=n, d=d, L=L,
                points_per_cluster=points_per_cluster, seed=seed)
    return Dataset(X, X.copy(), labels, subspaces, meta)


def nh_points(m, delta):
    """The 8m points in R^4 of the Nasihatkon-Hartley construction, as columns.

    The (cos, sin, +-delta, +-delta) family comes first, then the mirrored one.
    """
    if m < 1:
        raise InvalidParameter("m must be at least 1")
    if not 0 < delta < 1:
        raise InvalidParameter("delta must lie in (0, 1)")
    first, second = [], []
    for k in range(m):
        theta = k * np.pi / m
        c, s = np.cos(theta), np.sin(theta)
        for a in (1, -1):
            for b in (1, -1):
                first.append((c, s, a * delta, b * delta))
                second.append((a * delta, b * delta, c, s))
    return np.array(first + second).T


def gen_nh(n, m, delta, sigma_noise=0.0, seed=0):
    """Two 4-dim subspaces of R^n each carrying the 8m-point hard configuration.

    Columns are normalized before Gaussian noise of entry variance
    ``sigma_noise**2 / n`` is added.
    """
    if n <= 4:
        raise InvalidParameter("ambient dimension must exceed 4")
    if sigma_noise < 0:
        raise InvalidParameter("sigma_noise must be non-negative")
    A = nh_points(m, delta)
    rng = np.random.default_rng(seed)
    W1 = random_orthonormal(n, 4, rng)
    W2 = random_orthonormal(n, 4, rng)
    X = normalize_columns(np.hstack([W1 @ A, W2 @ A]))
    Y, _ = add_noise(X, "gaussian", sigma_noise, seed=rng)
    labels = np.repeat([1, 2], A.shape[1])
    meta = dict(generator="nh", n=n, m=m, delta=delta, sigma=sigma_noise, seed=seed)
    return Dataset(X, Y, labels, [Subspace(W1), Subspace(W2)], meta)


def gen_prop1(epsilon=0.1, normalize=False):
    """Two orthogonal planes in R^4 whose 4+4 points an eps-perturbation splits into pairs.

    Clean points have plane coordinates ``[[1, -1, e, e], [e, e, 1, -1]]``; the
    perturbed ones ``[[1, -1, 0, 0], [0, 0, 1, -1]]``, so every noise column has
    norm exactly ``epsilon``.
    """
    if not 0 < epsilon < 1:
        raise InvalidParameter("epsilon must lie in (0, 1)")
    e = epsilon
    Z = np.array([[1.0, -1.0, e, e], [e, e, 1.0, -1.0]])
    Z_noisy = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]])
    U1, U2 = np.eye(4)[:, :2], np.eye(4)[:, 2:]
    X = np.hstack([U1 @ Z, U2 @ Z])
    Y = np.hstack([U1 @ Z_noisy, U2 @ Z_noisy])
    if normalize:
        # keep the perturbation direction, re-measure xi afterwards via Dataset.xi
        X, Y = normalize_columns(X), normalize_columns(Y)
    labels = np.repeat([1, 2], 4)
    meta = dict(generator="prop1", epsilon=epsilon, normalize=normalize)
    return Dataset(X, Y, labels, [Subspace(U1), Subspace(U2)], meta)


def simplex_vertices(d):
    """The d unit vertices of a regular simplex in R^(d-1) centred at the origin.

    The first vertex sits on the first axis, so d=3 gives (1, 0),
    (-1/2, sqrt(3)/2), (-1/2, -sqrt(3)/2).
    """
    if d < 2:
        raise InvalidParameter("need d >= 2")
    V = np.eye(d) - 1.0 / d
    V /= np.linalg.norm(V, axis=0)
    Q, R = np.linalg.qr(V[:, : d - 1])
    Q = Q * np.sign(np.diag(R))
    return Q.T @ V


def gen_simplex_degenerate(d, sigma_l, seed=None):
    """d points in general position that a perturbation of size sigma_l/sqrt(d)
    per point pushes into a (d-1)-dimensional subspace.

    Coordinates are ``[simplex vertices; sigma_l/sqrt(d) ...]`` in an
    orthonormal basis of R^d (standard basis when ``seed`` is None).
    """
    if sigma_l <= 0:
        raise InvalidParameter("sigma_l must be positive")
    B = np.vstack([simplex_vertices(d), np.full((1, d), sigma_l / np.sqrt(d))])
    U = np.eye(d) if seed is None else random_orthonormal(d, d, np.random.default_rng(seed))
    X = U @ B
    E = -U[:, -1:] @ B[-1:, :]
    meta = dict(generator="simplex", d=d, sigma_l=sigma_l, seed=seed)
    return Dataset(X, X + E, np.ones(d, dtype=int), [Subspace(U)], meta)


GENERATORS = {
    "semirandom": gen_semirandom,
    "nh": gen_nh,
    "prop1": gen_prop1,
    "simplex": gen_simplex_degenerate,
}
