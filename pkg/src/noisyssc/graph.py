"""Similarity graph built from self-expression coefficients, and SEP metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DegenerateInput, DimensionMismatch, InvalidParameter

ZERO_REL = 1e-6


@dataclass
class SimilarityGraph:
    """Symmetric nonnegative weights; edges are entries above ``zero_threshold``."""

    weights: np.ndarray
    zero_threshold: float = 0.0

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InvalidParameter("weights must be a square matrix")
        if not np.array_equal(W, W.T):
            raise InvalidParameter("weights must be symmetric")
        if np.any(W < 0) or np.any(np.diag(W) != 0):
            raise InvalidParameter("weights must be nonnegative with zero diagonal")
        self.weights = W

    @property
    def n_vertices(self) -> int:
        return self.weights.shape[0]

    def adjacency(self) -> np.ndarray:
        return self.weights > self.zero_threshold

    def with_threshold(self, zero_threshold):
        return SimilarityGraph(self.weights, zero_threshold)


def default_threshold(W, rel=ZERO_REL):
    return rel * float(np.max(W, initial=0.0))


def symmetrize(coeffs, rel=ZERO_REL) -> SimilarityGraph:
    """``W[i, j] = |C[i, j]| + |C[j, i]|``; ``coeffs`` is a CoefficientMatrix or array."""
    C = np.abs(np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=float))
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidParameter("coefficient matrix must be square")
    W = C + C.T
    return SimilarityGraph(W, default_threshold(W, rel))


def connected_components(G: SimilarityGraph) -> list:
    """Vertex sets of the connected components, ordered by smallest member."""
    _, labels = _cc(csr_matrix(G.adjacency()), directed=False)
    groups = {}
    for v, lab in enumerate(labels):
        groups.setdefault(lab, []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def _check_labels(G, truth):
    truth = np.asarray(truth)
    if truth.shape != (G.n_vertices,):
        raise DimensionMismatch(f"{truth.shape[0]} labels for {G.n_vertices} vertices")
    return truth


def sep_holds(G: SimilarityGraph, truth) -> bool:
    """True iff no above-threshold edge joins points with different labels."""
    truth = _check_labels(G, truth)
    cross = truth[:, None] != truth[None, :]
    return not np.any(G.adjacency() & cross)


def relative_violation(G: SimilarityGraph, truth) -> float:
    """Cross-cluster similarity mass divided by same-cluster mass.

    Only above-threshold entries count, so that a graph satisfying SEP scores 0.
    """
    truth = _check_labels(G, truth)
    W = np.where(G.adjacency(), G.weights, 0.0)
    same = truth[:, None] == truth[None, :]
    inside = W[same].sum()
    if inside == 0:
        raise DegenerateInput("no same-cluster similarity mass")
    return float(W[~same].sum() / inside)
