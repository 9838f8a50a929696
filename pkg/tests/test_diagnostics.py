import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noisyssc.datagen import gen_prop1, gen_semirandom, random_orthonormal
from noisyssc.diagnostics import (check_theorem2_conditions, cluster_inradius,
                                  dual_direction_check, inradius, lambda_range,
                                  restricted_eigenvalue, verify_support_bound)
from noisyssc.errors import BudgetExceeded, DegenerateInput, InvalidParameter
from noisyssc.geometry import orthonormal_basis


def polar_vertex_oracle(Z):
    """Inradius as 1 / circumradius of {u : |Z^T u| <= 1} by brute-force vertex enumeration."""
    d, m = Z.shape
    rows = np.vstack([Z.T, -Z.T])
    best = 0.0
    for combo in itertools.combinations(range(2 * m), d):
        A = rows[list(combo)]
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        u = np.linalg.solve(A, np.ones(d))
        if np.all(rows @ u <= 1 + 1e-9):
            best = max(best, np.linalg.norm(u))
    return 1.0 / best


def sampling_oracle(Z, n_dirs, seed=0):
    """min over sampled unit directions of max_i |<u, z_i>| (support function)."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((n_dirs, Z.shape[0]))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return float(np.min(np.max(np.abs(u @ Z), axis=1)))


def coords(P):
    return orthonormal_basis(P).basis.T @ P


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cross_polytope_inradius(d):
    assert inradius(np.eye(d)) == pytest.approx(1 / np.sqrt(d), abs=1e-9)


def test_inradius_in_ambient_space():
    P = np.zeros((5, 2))
    P[1, 0] = P[3, 1] = 1
    assert inradius(P) == pytest.approx(1 / np.sqrt(2), abs=1e-12)


# frozen output of polar_vertex_oracle, cross-checked by direction sampling
THREE_POINT_LOO = 0.38268343236508967


def test_three_point_leave_one_out_frozen():
    P = np.array([[1, 0, 1 / np.sqrt(2)], [0, 1, 1 / np.sqrt(2)]])
    assert cluster_inradius(P) == pytest.approx(THREE_POINT_LOO, abs=1e-12)
    oracle = min(polar_vertex_oracle(np.delete(P, i, axis=1)) for i in range(3))
    assert oracle == pytest.approx(THREE_POINT_LOO, abs=1e-12)
    sampled = min(sampling_oracle(np.delete(P, i, axis=1), 1_000_000) for i in range(3))
    assert THREE_POINT_LOO <= sampled <= THREE_POINT_LOO + 1e-6


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_inradius_matches_vertex_enumeration(d, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(d, d + 5))
    U = random_orthonormal(d + 2, d, rng)
    P = U @ rng.standard_normal((d, m))
    P /= np.linalg.norm(P, axis=0)
    assert inradius(P) == pytest.approx(polar_vertex_oracle(coords(P)), rel=1e-9)


def test_inradius_errors():
    with pytest.raises(DegenerateInput):
        inradius(np.eye(2), leave_out=0)
    with pytest.raises(BudgetExceeded):
        inradius(np.eye(6))
    with pytest.raises(BudgetExceeded):
        inradius(np.random.default_rng(0).standard_normal((3, 31)))


def test_restricted_eigenvalue_examples():
    assert restricted_eigenvalue(np.eye(5)[:, :4], 2) == pytest.approx(1)
    P = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert restricted_eigenvalue(P, 2) == pytest.approx(0, abs=1e-15)
    ds = gen_prop1(0.1)
    assert restricted_eigenvalue(ds.X[:, :4], 2) == pytest.approx(np.sqrt(2) * 0.1, abs=1e-12)
    with pytest.raises(BudgetExceeded):
        restricted_eigenvalue(np.ones((3, 60)), 5, budget=1000)


@given(st.integers(0, 2**32 - 1))
def test_restricted_eigenvalue_is_a_minimum(seed):
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((4, 7))
    d = int(rng.integers(1, 5))
    sigma = restricted_eigenvalue(P, d)
    pick = rng.choice(7, d, replace=False)
    assert sigma <= np.linalg.svd(P[:, pick], compute_uv=False)[-1] + 1e-15


def test_lambda_range_examples():
    assert lambda_range(0.0, [0.5], [0.4]) == pytest.approx((0.0, 0.1))
    assert lambda_range(0.01, [0.5], [0.4]) == pytest.approx((0.061206, 0.1))
    assert lambda_range(0.2, [0.5], [0.4]) is None
    with pytest.raises(InvalidParameter):
        lambda_range(0.0, [1.5], [0.4])


@given(st.floats(0, 0.05), st.floats(0, 0.05), st.floats(0.05, 0.95), st.floats(0.05, 1))
def test_lambda_range_monotone_in_xi(x1, x2, rho, sigma):
    a, b = sorted((x1, x2))
    ia, ib = lambda_range(a, [rho], [sigma]), lambda_range(b, [rho], [sigma])
    if ib is not None:
        assert ia is not None and ia[0] <= ib[0] and ia[1] == ib[1]


def test_conditions_noiseless_semirandom():
    ds = gen_semirandom(10, 2, 3, 8, seed=2)
    rep = check_theorem2_conditions(ds.X, ds.E, ds.labels, 2)
    assert rep.separation_ok and rep.noise_ok and rep.xi == 0 and rep.mu_eps == 0
    assert all(0 < r < 1 for r in rep.inradii)
    assert rep.lambda_interval[0] == 0 and rep.lambda_interval[1] > 0


def test_separation_arithmetic_on_orthogonal_planes():
    # d=2, xi=0.1, sigma=0.5 each, distance 2 > 8*2*0.01/0.25 = 0.64
    c = np.cos(np.pi / 3)
    s = np.sin(np.pi / 3)
    Z = np.array([[1, c, -c], [0, s, s]])
    X = np.zeros((4, 6))
    X[:2, :3] = Z
    X[2:, 3:] = Z
    labels = np.repeat([1, 2], 3)
    E = np.zeros_like(X)
    E[0, 0] = 0.1
    rep = check_theorem2_conditions(X, E, labels, 2)
    assert rep.xi == pytest.approx(0.1)
    need = 8 * 2 * 0.01 / min(rep.restricted_eigenvalues) ** 2
    assert rep.separation_ok == (2 > need)


def test_prop1_violates_noise_condition():
    ds = gen_prop1(0.1)
    rep = check_theorem2_conditions(ds.X, ds.E, ds.labels, 2)
    assert not rep.noise_ok
    assert rep.restricted_eigenvalues[0] == pytest.approx(np.sqrt(2) * 0.1)


def test_support_bound_examples():
    C = np.array([[0, 1.0, 0], [0, 0, 0], [0, 1.0, 0]])
    assert verify_support_bound(C, 2).tolist() == [False, True, False]


def test_dual_direction_examples():
    pts = np.array([[1, -1, 0, 0], [0, 0, 1, -1.0]])
    for leave in (None, 0, 1, 2, 3):
        assert dual_direction_check(np.array([1.0, 0.0]), pts, leave)
        assert dual_direction_check(np.array([1.0, 1.0]) / np.sqrt(2), pts, leave)
    with pytest.raises(InvalidParameter):
        dual_direction_check(np.array([0, 0, 1.0]), np.eye(3)[:, :2])
    with pytest.raises(InvalidParameter):
        dual_direction_check(np.array([2.0, 0.0]), pts)
    assert inradius(pts, 0) == pytest.approx(1 / np.sqrt(2))


@given(st.integers(0, 2**32 - 1))
def test_dual_direction_monte_carlo(seed):
    rng = np.random.default_rng(seed)
    U = random_orthonormal(6, 3, rng)
    P = U @ rng.standard_normal((3, 9))
    P /= np.linalg.norm(P, axis=0)
    leave = int(rng.integers(0, 9))
    for _ in range(20):
        u = U @ rng.standard_normal(3)
        assert dual_direction_check(u / np.linalg.norm(u), P, leave)
