"""End-to-end clustering: noiseless SSC, noisy SSC with subspace merging, and the
exhaustive l0 / minimal union-of-subspaces procedures for tiny instances."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .datagen import normalize_columns
from .errors import (BudgetExceeded, InsufficientComponents, InvalidParameter,
                     StructureInconsistent)
from .geometry import (DEFAULT_RANK_TOL, Subspace, angular_distance, canonical_angles,
                       numerical_rank, orthonormal_basis)
from .graph import SimilarityGraph, connected_components, symmetrize
from .solvers import CoefficientMatrix, l0_min, self_expression_matrix
from .spectral import ClusterAssignment, spectral_cluster

log = logging.getLogger(__name__)


@dataclass
class RecoveredStructure:
    assignment: ClusterAssignment
    subspaces: list
    component_map: dict  # component index -> 0-based merged group
    components: list
    graph: SimilarityGraph | None = None
    coefficients: CoefficientMatrix | None = None
    merge_heights: list = field(default_factory=list)
    n_residual_assigned: int = 0
    warnings: list = field(default_factory=list)

    @property
    def labels(self):
        return self.assignment.labels


def subspace_distance(S: Subspace, T: Subspace) -> float:
    """Half the squared Frobenius distance between the two orthogonal projectors.

    Equals the angular distance for equal dimensions and still makes sense when a
    noisy component spans fewer than d directions.
    """
    if S.intrinsic_dim == T.intrinsic_dim:
        return angular_distance(S, T)
    aff2 = float(np.linalg.norm(S.basis.T @ T.basis) ** 2)
    return max(0.5 * (S.intrinsic_dim + T.intrinsic_dim) - aff2, 0.0)


def single_linkage(dist, L):
    """Single-linkage agglomeration of a distance matrix down to ``L`` groups.

    Ties break on the smaller distance, then the smaller index pair. Returns the
    0-based group of every item (groups numbered by smallest member) and the
    merge heights in order.
    """
    dist = np.asarray(dist, dtype=float)
    k = dist.shape[0]
    if L < 1 or L > k:
        raise InvalidParameter(f"cannot form {L} groups from {k} items")
    pairs = sorted((dist[i, j], i, j) for i in range(k) for j in range(i + 1, k))
    ds = DisjointSet(range(k))
    groups, heights = k, []
    for h, i, j in pairs:
        if groups == L:
            break
        if ds.merge(i, j):
            groups -= 1
            heights.append(float(h))
    roots = {}
    out = []
    for i in range(k):
        out.append(roots.setdefault(ds[i], len(roots)))
    return out, heights


def merge_subspaces(subspaces, L, return_heights=False):
    """Merge subspaces by single linkage under angular distance until ``L`` remain.

    Returns a dict mapping input index to its 0-based group.
    """
    k = len(subspaces)
    if k < L:
        raise InvalidParameter(f"{k} subspaces cannot be merged into {L} groups")
    dist = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        dist[i, j] = dist[j, i] = subspace_distance(subspaces[i], subspaces[j])
    groups, heights = single_linkage(dist, L)
    mapping = dict(enumerate(groups))
    return (mapping, heights) if return_heights else mapping


def _is_inside(small: Subspace, big: Subspace, tol) -> bool:
    return bool(np.all(canonical_angles(small, big) < np.sqrt(tol)))


def _identify_subspaces(spans, equality_tol):
    """Group equal spans; returns (unique subspaces, index of unique per span)."""
    unique, which = [], []
    for S in spans:
        for u, T in enumerate(unique):
            if S.intrinsic_dim == T.intrinsic_dim:
                if angular_distance(S, T) < equality_tol:
                    which.append(u)
                    break
            else:
                small, big = sorted((S, T), key=lambda s: s.intrinsic_dim)
                if _is_inside(small, big, equality_tol):
                    raise StructureInconsistent(
                        f"a {small.intrinsic_dim}-dim component span lies inside a "
                        f"{big.intrinsic_dim}-dim one")
        else:
            which.append(len(unique))
            unique.append(S)
    return unique, which


def cluster_noiseless(X, rank_tol=DEFAULT_RANK_TOL, equality_tol=1e-8, bp_tol=1e-8):
    """Noiseless SSC with the subspace-recovery post-processing step.

    Basis pursuit per column, connected components of the similarity graph, the
    span of each component, and one cluster per distinct span. The number of
    clusters is inferred.
    """
    Xn = normalize_columns(X)
    C = self_expression_matrix(Xn, "basis_pursuit", tol=bp_tol)
    G = symmetrize(C)
    comps = connected_components(G)
    spans = [orthonormal_basis(Xn[:, c], rank_tol) for c in comps]
    unique, which = _identify_subspaces(spans, equality_tol)
    labels = np.empty(Xn.shape[1], dtype=int)
    for comp, u in zip(comps, which):
        labels[comp] = u + 1
    return RecoveredStructure(ClusterAssignment(labels, len(unique)), unique,
                              dict(enumerate(which)), comps, G, C)


def _group_subspace(Y, d, rank_tol):
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    r = min(d, int(np.sum(s > rank_tol * s[0])))
    return Subspace(U[:, :r])


def cluster_noisy(Y, L, d, lam, seed=0, strict=True, rank_tol=DEFAULT_RANK_TOL,
                  lasso_tol=1e-8, coefficients=None, oversegment=None, span="sample"):
    """Noisy SSC followed by subspace merging.

    Each connected component with at least ``d`` points contributes the span of
    ``d`` of its points picked at random (``seed``); these spans are merged by
    single linkage under angular distance into exactly ``L`` groups. Points in
    smaller components go to the merged group whose subspace leaves the least
    residual.

    With ``strict`` a component whose sampled points span fewer than ``d``
    directions raises StructureInconsistent; otherwise the lower-dimensional span
    is used and a warning recorded.

    ``oversegment=K`` replaces the connected components by a K-way spectral
    clustering of the similarity graph, for graphs that are connected but
    weakly so. ``span="svd"`` estimates each group's subspace from all its
    points (top ``d`` left singular vectors) instead of ``d`` sampled ones.
    """
    if L < 1 or d < 1 or lam <= 0:
        raise InvalidParameter("need L >= 1, d >= 1 and lambda > 0")
    Yn = normalize_columns(Y)
    N = Yn.shape[1]
    C = coefficients if coefficients is not None else self_expression_matrix(
        Yn, "lasso", lam=lam, tol=lasso_tol)
    warnings = [f"column {i} has an all-zero Lasso solution" for i in C.zero_columns]
    G = symmetrize(C)
    if span not in ("sample", "svd"):
        raise InvalidParameter(f"span must be 'sample' or 'svd', got {span!r}")
    if oversegment is None:
        comps = connected_components(G)
    else:
        if oversegment < L:
            raise InvalidParameter("oversegment must be at least L")
        seg = spectral_cluster(G, oversegment, seed=seed).labels
        comps = [c for c in (np.flatnonzero(seg == k).tolist()
                             for k in range(1, oversegment + 1)) if c]
        comps.sort(key=lambda c: c[0])
    big = [r for r, comp in enumerate(comps) if len(comp) >= d]
    if len(big) < L:
        raise InsufficientComponents(
            f"only {len(big)} components have >= {d} points, need {L}")

    rng = np.random.default_rng(seed)
    spans = []
    for r in big:
        if span == "svd":
            S = _group_subspace(Yn[:, comps[r]], d, rank_tol)
        else:
            pick = np.sort(rng.choice(comps[r], size=d, replace=False))
            S = orthonormal_basis(Yn[:, pick], rank_tol)
        if S.intrinsic_dim != d:
            msg = f"component {r} spans {S.intrinsic_dim} < {d} dimensions"
            if strict:
                raise StructureInconsistent(msg)
            warnings.append(msg)
        spans.append(S)

    mapping, heights = merge_subspaces(spans, L, return_heights=True)
    component_map = {r: mapping[pos] for pos, r in enumerate(big)}
    labels = np.zeros(N, dtype=int)
    for r, g in component_map.items():
        labels[comps[r]] = g + 1

    group_subspaces = [_group_subspace(Yn[:, labels == g + 1], d, rank_tol)
                       for g in range(L)]
    stray = np.flatnonzero(labels == 0)
    if stray.size:
        resid = np.array([S.residual(Yn[:, stray]) for S in group_subspaces])
        labels[stray] = resid.argmin(axis=0) + 1
        for r, comp in enumerate(comps):
            if r not in component_map:
                component_map[r] = int(labels[comp[0]] - 1)

    if heights and L > 1 and len(spans) > L:
        # weakest link between the final groups vs the tallest merge inside one
        between = min(subspace_distance(spans[a], spans[b])
                      for a, b in itertools.combinations(range(len(spans)), 2)
                      if mapping[a] != mapping[b])
        if max(heights) >= 0.5 * between:
            warnings.append(f"merged groups are poorly separated: merge heights "
                            f"{[round(h, 6) for h in heights]}, closest other group "
                            f"{between:.6f}")
    for w in warnings:
        log.warning(w)
    return RecoveredStructure(ClusterAssignment(labels, L), group_subspaces, component_map,
                              comps, G, C, heights, int(stray.size), warnings)


# ---------------------------------------------------------------------------
# minimal union-of-subspaces structures (exhaustive, desk scale only)


def _members(Xn, pool, basis, tol):
    P = Xn[:, pool]
    resid = np.linalg.norm(P - basis @ (basis.T @ P), axis=0)
    return [i for i, r in zip(pool, resid) if r <= tol]


def _largest_flat(Xn, remaining, k, tol, counter):
    """Largest subset of ``remaining`` inside one k-dim subspace with >= k+1 points."""
    best = None
    for combo in itertools.combinations(remaining, k):
        counter[0] -= 1
        if counter[0] < 0:
            raise BudgetExceeded("subset enumeration budget exhausted")
        A = Xn[:, combo]
        if numerical_rank(A, tol) < k:
            continue
        members = _members(Xn, remaining, orthonormal_basis(A, tol).basis, tol)
        if len(members) >= k + 1 and (
                best is None or (-len(members), members) < (-len(best), best)):
            best = members
    return best


def _as_parts(partition):
    partition = list(partition)
    if partition and np.ndim(partition[0]) == 0:
        groups = {}
        for i, lab in enumerate(partition):
            groups.setdefault(int(lab), []).append(i)
        return [tuple(g) for g in groups.values()]
    return [tuple(sorted(int(i) for i in p)) for p in partition]


def _labels_from_parts(parts, N):
    labels = np.zeros(N, dtype=int)
    for lab, part in enumerate(sorted(parts, key=min), start=1):
        labels[list(part)] = lab
    return labels


def minimal_structure(X, tol=1e-8, budget=1_000_000):
    """One minimal union-of-subspaces partition of the columns of ``X``.

    For k = 1, 2, ... repeatedly peel off the largest set of remaining points
    lying in a k-dimensional subspace, provided it holds at least k+1 points.
    Points never peeled off end up as singletons. Returns 1-based labels
    numbered by smallest member.
    """
    Xn = normalize_columns(X)
    n, N = Xn.shape
    counter = [budget]
    remaining = list(range(N))
    parts = []
    k = 1
    while len(remaining) >= k + 1 and k <= n:
        best = _largest_flat(Xn, remaining, k, tol, counter)
        if best is None:
            k += 1
            continue
        parts.append(tuple(best))
        remaining = [i for i in remaining if i not in best]
    parts.extend((i,) for i in remaining)
    return _labels_from_parts(parts, N)


def validate_minimal_structure(X, partition, tol=1e-8, budget=1_000_000):
    """Check that ``partition`` (labels or list of index sets) is a minimal structure.

    Every part must be in general position within its span and hold more points
    than its dimension (singletons excepted), and some order of peeling the parts
    off must reproduce the greedy construction of ``minimal_structure``: at each
    dimension the next part is a largest-possible flat, tie choices included.
    """
    Xn = normalize_columns(X)
    n, N = Xn.shape
    parts = _as_parts(partition)
    flat = sorted(i for p in parts for i in p)
    if flat != list(range(N)):
        return False
    dims = {}
    for p in parts:
        if len(p) == 1:
            continue
        k = numerical_rank(Xn[:, p], tol)
        if len(p) < k + 1:
            return False
        if any(numerical_rank(Xn[:, c], tol) < k for c in itertools.combinations(p, k)):
            return False
        dims[p] = k
    counter = [budget]

    def peel(remaining, pending, k):
        if not pending:
            # whatever is left must be singletons that no flat can absorb
            while len(remaining) >= k + 1 and k <= n:
                if _largest_flat(Xn, sorted(remaining), k, tol, counter) is not None:
                    return False
                k += 1
            return True
        if len(remaining) < k + 1 or k > n:
            return False
        best = _largest_flat(Xn, sorted(remaining), k, tol, counter)
        if best is None:
            return peel(remaining, pending, k + 1)
        for p in pending:
            if dims[p] != k or len(p) != len(best) or not set(p) <= remaining:
                continue
            basis = orthonormal_basis(Xn[:, p], tol).basis
            if set(_members(Xn, sorted(remaining), basis, tol)) != set(p):
                continue
            if peel(remaining - set(p), pending - {p}, k):
                return True
        return False

    return peel(set(range(N)), frozenset(dims), 1)


def l0_supports(X, tol=1e-8, budget=1_000_000):
    """Every minimal l0 support of every column, in original column indices."""
    Xn = normalize_columns(X)
    N = Xn.shape[1]
    out = []
    for i in range(N):
        others = np.r_[0:i, i + 1:N]
        sups = l0_min(Xn[:, others], Xn[:, i], tol=tol, budget=budget)
        out.append([tuple(int(others[j]) for j in s) for s in sups])
    return out


def l0_partition(X, chosen, tol=1e-8):
    """Partition induced by one chosen minimal support per point.

    Candidate subspaces are the span of each point with its support and the span
    of each connected component of the support graph. Candidates are claimed in
    ascending dimension, largest membership first, each taking every unclaimed
    point it contains, as long as that is more points than its dimension.
    """
    Xn = normalize_columns(X)
    N = Xn.shape[1]
    adj = np.zeros((N, N))
    for i, sup in enumerate(chosen):
        adj[list(sup), i] = 1.0
    G = symmetrize(adj)
    candidates = [orthonormal_basis(Xn[:, [i, *sup]], tol) for i, sup in enumerate(chosen)]
    candidates += [orthonormal_basis(Xn[:, comp], tol) for comp in connected_components(G)]
    remaining = list(range(N))
    parts = []
    while remaining:
        best = None
        for S in candidates:
            members = _members(Xn, remaining, S.basis, tol)
            if len(members) < S.intrinsic_dim + 1:
                continue
            key = (S.intrinsic_dim, -len(members), members)
            if best is None or key < best:
                best = key
        if best is None:
            break
        parts.append(tuple(best[2]))
        remaining = [i for i in remaining if i not in best[2]]
    parts.extend((i,) for i in remaining)
    return _labels_from_parts(parts, N)


def l0_cluster(X, tol=1e-8, budget=1_000_000, choice=None):
    """Clustering from exact l0 self-expression.

    ``choice[i]`` selects which of point i's minimal supports to use (default:
    the lexicographically first).
    """
    supports = l0_supports(X, tol, budget)
    if choice is None:
        choice = [0] * len(supports)
    chosen = [sups[c] for sups, c in zip(supports, choice)]
    return l0_partition(X, chosen, tol)


def same_partition(a, b) -> bool:
    """Whether two label vectors describe the same partition."""
    return sorted(map(sorted, _as_parts(a))) == sorted(map(sorted, _as_parts(b)))
