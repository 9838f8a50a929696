"""Self-expression programs: basis pursuit, Lasso and exhaustive l0.

Every solver takes a dictionary ``D`` (n x p, columns are atoms) and a target
vector ``t`` and returns coefficients over the atoms.  Column normalization is
the caller's job.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BudgetExceeded, Infeasible, InvalidParameter, SolverDiverged,
                     SolverError, DegenerateInput)

LASSO_TOL = 1e-8
# relative cut below which a coefficient counts as zero
ZERO_REL = 1e-6
BOUND_JITTER = 1e-10


def _prep(D, t):
    D = np.ascontiguousarray(D, dtype=float)
    t = np.ascontiguousarray(t, dtype=float).ravel()
    if D.ndim != 2 or D.shape[0] != t.shape[0]:
        raise InvalidParameter(f"dictionary {D.shape} incompatible with target {t.shape}")
    return D, t


def _kkt(D, t, lam, c):
    g = D.T @ (t - D @ c)
    v = np.where(c > 0, np.abs(g - lam), np.where(c < 0, np.abs(g + lam), np.abs(g) - lam))
    return float(max(v.max(initial=0.0), 0.0))


def kkt_residual(D, t, lam, c) -> float:
    """Largest violation of the Lasso subgradient optimality conditions at ``c``."""
    D, t = _prep(D, t)
    return _kkt(D, t, float(lam), np.asarray(c, dtype=float).ravel())


def lasso_objective(D, t, lam, c) -> float:
    r = np.asarray(t) - np.asarray(D) @ c
    return 0.5 * float(r @ r) + lam * float(np.abs(c).sum())


def _refit(D, t, lam, atoms, signs):
    """Solve the stationarity equations exactly on a fixed support and sign pattern."""
    S = D[:, atoms]
    coef = np.linalg.solve(S.T @ S, S.T @ t - lam * signs)
    c = np.zeros(D.shape[1])
    c[atoms] = coef
    return c


def _dual_projection(D, p, max_iter, bounds=None):
    """Project ``p`` onto ``{theta : |D^T theta| <= 1}`` by a primal active-set method.

    Returns ``(theta, atoms, signs, mu)``: the working constraints
    ``signs * D[:, atoms]^T theta = 1`` with their nonnegative multipliers.
    The working rows stay linearly independent, so at most ``n`` are kept.
    """
    n = D.shape[0]
    b = np.ones(2 * D.shape[1]) if bounds is None else bounds
    scale = 1.0 + np.linalg.norm(p)
    theta = np.zeros(n)  # the origin is always feasible
    atoms, signs = [], []
    for _ in range(max_iter):
        goal = p - theta
        if atoms:
            Aw = D[:, atoms] * np.array(signs, dtype=float)
            Q, _ = np.linalg.qr(Aw)
            step = goal - Q @ (Q.T @ goal)
        else:
            step = goal
        if np.linalg.norm(step) > 1e-13 * scale:
            rate = D.T @ step
            g = D.T @ theta
            rates = np.concatenate([rate, -rate])
            slacks = np.maximum(b - np.concatenate([g, -g]), 0.0)
            for a, s in zip(atoms, signs):
                rates[a if s > 0 else a + D.shape[1]] = 0.0
            blocking = rates > 1e-14 * np.linalg.norm(step)
            alpha = 1.0
            hit = -1
            if np.any(blocking):
                ratios = np.full(rates.shape, np.inf)
                ratios[blocking] = slacks[blocking] / rates[blocking]
                hit = int(np.argmin(ratios))
                alpha = min(1.0, ratios[hit])
            theta = theta + alpha * step
            if alpha < 1.0:
                atoms.append(hit % D.shape[1])
                signs.append(1 if hit < D.shape[1] else -1)
            continue
        if not atoms:
            return theta, [], [], np.zeros(0)
        Aw = D[:, atoms] * np.array(signs, dtype=float)
        mu, *_ = np.linalg.lstsq(Aw, goal, rcond=None)
        worst = int(np.argmin(mu))
        if mu[worst] >= -1e-12 * scale:
            return theta, atoms, signs, np.maximum(mu, 0.0)
        del atoms[worst], signs[worst]
    raise SolverDiverged(f"active-set projection did not finish in {max_iter} iterations")


def lasso(D, t, lam, tol=LASSO_TOL, max_iter=None):
    """Minimize ``0.5 ||t - D c||^2 + lam ||c||_1``.

    Solved through the dual: the optimal residual ``t - D c`` equals ``lam``
    times the Euclidean projection of ``t / lam`` onto the polytope
    ``|D^T theta| <= 1``, and the multipliers of the active facets are the
    coefficients. The projection lives in the ambient dimension, which keeps
    it exact even for very coherent dictionaries where the primal optimum is
    not unique. The support found is then re-solved on its sign pattern.
    Returns ``(c, kkt)`` with ``kkt <= tol``; raises SolverDiverged otherwise.
    """
    if lam <= 0:
        raise InvalidParameter("lambda must be positive")
    D, t = _prep(D, t)
    lam = float(lam)
    p = D.shape[1]
    if p == 0:
        return np.zeros(0), 0.0
    if max_iter is None:
        max_iter = 20 * (2 * p + D.shape[0]) + 100
    # distinct facet offsets keep vertices of the polytope simple, which rules
    # out cycling on coherent data; the final re-solve uses the true offsets
    bounds = 1.0 + BOUND_JITTER * np.random.default_rng(0).random(2 * p)
    _, atoms, signs, mu = _dual_projection(D, t / lam, max_iter, bounds)
    c = np.zeros(p)
    keep = mu > 0
    atoms = np.array(atoms, dtype=int)[keep]
    signs = np.array(signs, dtype=float)[keep]
    c[atoms] = lam * signs * mu[keep]
    kkt = _kkt(D, t, lam, c)
    if atoms.size:
        try:
            alt = _refit(D, t, lam, atoms, signs)
            alt_kkt = _kkt(D, t, lam, alt)
            if alt_kkt < kkt and np.all(np.sign(alt[atoms]) == signs):
                c, kkt = alt, alt_kkt
        except np.linalg.LinAlgError:
            pass
    if kkt > tol:
        raise SolverDiverged(
            f"Lasso stopped at KKT residual {kkt:.3e} > {tol:.1e}", residual=kkt)
    return c, kkt


def _lstsq_residual(A, t):
    coef, *_ = np.linalg.lstsq(A, t, rcond=None)
    return coef, float(np.linalg.norm(t - A @ coef))


def basis_pursuit(D, t, tol=1e-8, max_halvings=80):
    """Minimize ``||c||_1`` subject to ``||t - D c||_2 <= tol``.

    Solved as the small-lambda limit of the Lasso: lambda is halved (warm
    starts) until the Lasso support, re-fit by least squares, reproduces the
    target and keeps the Lasso signs. On a fixed support with fixed signs the
    Lasso path is affine in lambda, so that re-fit is the lambda -> 0 endpoint.
    """
    D, t = _prep(D, t)
    if D.shape[1] == 0:
        raise Infeasible("empty dictionary")
    _, res = _lstsq_residual(D, t)
    if res > tol:
        raise Infeasible(f"target lies {res:.3e} away from the dictionary span (tol {tol:.1e})")
    lam = float(np.max(np.abs(D.T @ t)))
    c = np.zeros(D.shape[1])
    if lam == 0.0:
        return c
    for _ in range(max_halvings):
        lam *= 0.5
        c, _ = lasso(D, t, lam, tol=max(1e-6 * lam, 1e-14))
        support = np.flatnonzero(c)
        if support.size:
            coef, res = _lstsq_residual(D[:, support], t)
            if res <= tol and np.all(np.sign(coef) == np.sign(c[support])):
                out = np.zeros_like(c)
                out[support] = coef
                return out
        if np.linalg.norm(t - D @ c) <= tol:
            return c
    raise SolverDiverged("lambda continuation did not reach the equality constraint",
                         residual=float(np.linalg.norm(t - D @ c)))


def l0_min(D, t, tol=1e-8, budget=1_000_000):
    """All minimum-cardinality supports whose least-squares fit reproduces ``t``.

    Supports are returned as sorted index tuples in lexicographic order.
    """
    D, t = _prep(D, t)
    p = D.shape[1]
    if not np.any(t):
        return [()]
    if p == 0 or _lstsq_residual(D, t)[1] > tol:
        raise Infeasible("target is outside the dictionary span")
    examined = 0
    for k in range(1, p + 1):
        count = math.comb(p, k)
        if examined + count > budget:
            raise BudgetExceeded(
                f"enumerating supports of size {k} would examine {examined + count} > {budget}")
        examined += count
        combos = np.array(list(itertools.combinations(range(p), k)), dtype=np.intp)
        A = D[:, combos].transpose(1, 0, 2)  # (M, n, k)
        fit = A @ (np.linalg.pinv(A) @ t)[..., None]
        res = np.linalg.norm(t[None, :] - fit[..., 0], axis=1)
        hits = np.flatnonzero(res <= tol)
        if hits.size:
            return [tuple(int(j) for j in combos[h]) for h in hits]
    raise Infeasible("no support reproduces the target")


def support_coefficients(D, t, support):
    D, t = _prep(D, t)
    c = np.zeros(D.shape[1])
    if support:
        idx = list(support)
        c[idx] = _lstsq_residual(D[:, idx], t)[0]
    return c


def nonzero_mask(c, rel=ZERO_REL):
    """Entries above ``rel`` times the largest magnitude (per column for 2-d input)."""
    a = np.abs(np.asarray(c, dtype=float))
    peak = a.max(axis=0, keepdims=True) if a.ndim > 1 else a.max(initial=0.0)
    return (a > rel * peak) & (a > 0)


@dataclass
class CoefficientMatrix:
    """Self-expression coefficients; column ``i`` expresses point ``i``."""

    coeffs: np.ndarray
    kkt_residuals: np.ndarray
    solver_kind: str
    lam: float | None = None
    zero_columns: list = field(default_factory=list)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        n = self.coeffs.shape[0]
        if self.coeffs.shape != (n, n):
            raise InvalidParameter("coefficient matrix must be square")
        if np.any(np.diag(self.coeffs) != 0):
            raise InvalidParameter("coefficient matrix must have a zero diagonal")

    @property
    def n_points(self):
        return self.coeffs.shape[0]


SOLVERS = ("basis_pursuit", "lasso", "l0")


def _solve_column(kind, D, t, lam, tol, budget):
    if kind == "lasso":
        return lasso(D, t, lam, tol=tol)
    if kind == "basis_pursuit":
        c = basis_pursuit(D, t, tol=tol)
        return c, float(np.linalg.norm(t - D @ c))
    if kind == "l0":
        supports = l0_min(D, t, tol=tol, budget=budget)
        c = support_coefficients(D, t, supports[0])
        return c, float(np.linalg.norm(t - D @ c))
    raise InvalidParameter(f"unknown solver {kind!r}; choose from {SOLVERS}")


def self_expression_matrix(Y, solver_kind="lasso", lam=None, tol=None, budget=1_000_000):
    """Express every column of ``Y`` through all the others.

    Entry ``(j, i)`` of the result is the weight of point ``j`` in the
    representation of point ``i``; the diagonal is exactly zero.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidParameter("Y must be a matrix")
    if np.any(np.linalg.norm(Y, axis=0) == 0):
        raise DegenerateInput("Y has a zero column")
    if solver_kind == "lasso" and (lam is None or lam <= 0):
        raise InvalidParameter("lasso needs a positive lambda")
    if tol is None:
        tol = LASSO_TOL
    N = Y.shape[1]
    C = np.zeros((N, N))
    kkt = np.zeros(N)
    zero_cols = []
    for i in range(N):
        others = np.r_[0:i, i + 1:N]
        try:
            c, kkt[i] = _solve_column(solver_kind, Y[:, others], Y[:, i], lam, tol, budget)
        except SolverDiverged as err:
            err.column = i
            err.args = (f"column {i}: {err}",)
            raise
        except SolverError as err:
            raise type(err)(f"column {i}: {err}") from err
        C[others, i] = c
        if not np.any(c):
            zero_cols.append(i)
    return CoefficientMatrix(C, kkt, solver_kind, lam if solver_kind == "lasso" else None,
                             zero_cols)
