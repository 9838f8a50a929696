"""Normalized spectral clustering of a similarity graph."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .errors import InvalidParameter


@dataclass
class ClusterAssignment:
    labels: np.ndarray  # integers in 1..L
    L: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.size and (self.labels.min() < 1 or self.labels.max() > self.L):
            raise InvalidParameter(f"labels must lie in 1..{self.L}")


def spectral_embedding(W, L):
    """Row-normalized bottom-L eigenvectors of the symmetric normalized Laplacian.

    Isolated vertices get a zero row (they embed at the origin).
    """
    W = np.asarray(W, dtype=float)
    deg = W.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    lap = np.eye(len(W)) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    _, vecs = np.linalg.eigh(lap)
    V = vecs[:, :L]
    # reproducible signs: first clearly nonzero entry of every eigenvector positive
    for j in range(V.shape[1]):
        nz = np.flatnonzero(np.abs(V[:, j]) > 1e-10)
        if nz.size and V[nz[0], j] < 0:
            V[:, j] *= -1
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    return np.divide(V, norms, out=np.zeros_like(V), where=norms > 1e-12)


def spectral_cluster(G, L, seed=0, n_init=20, max_iter=300) -> ClusterAssignment:
    """Spectral clustering (normalized Laplacian + k-means++) into ``L`` groups."""
    W = getattr(G, "weights", G)
    N = len(W)
    if L < 1 or L > N:
        raise InvalidParameter(f"need 1 <= L <= N, got L={L}, N={N}")
    if L == 1:
        return ClusterAssignment(np.ones(N, dtype=int), 1)
    emb = spectral_embedding(W, L)
    km = KMeans(n_clusters=L, init="k-means++", n_init=n_init, max_iter=max_iter,
                random_state=seed).fit(emb)
    return ClusterAssignment(km.labels_ + 1, L)
