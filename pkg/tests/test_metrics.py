"""Quotient metric: oracle equivalence, axioms, invariance, condensed layout."""

import numpy as np
import pytest

from orbitmap import groups, metrics
from orbitmap.config import stream

ENUMERABLE = [
    groups.sign_flip(4),
    groups.hyperoctahedral_signs(3),
    groups.permutation(4),
    groups.cyclic_shift(5),
    groups.planar_rotation(5),
]

ALL_GROUPS = ENUMERABLE + [
    groups.phase_circle(2),
    groups.orthogonal_tuple(2, 2),
    groups.shape_group(4),
]


@pytest.mark.parametrize("G", ENUMERABLE)
def test_closed_form_matches_enumeration(G):
    rng = stream(10, f"metrics/oracle/{G.describe()}")
    for _ in range(50):
        x = rng.standard_normal(G.ambient_dim)
        y = rng.standard_normal(G.ambient_dim)
        closed = metrics.quotient_dist(G, x, y)
        brute = metrics.quotient_dist_enumerated(G, x, y)
        assert abs(closed - brute) <= 1e-12


@pytest.mark.parametrize("G", ALL_GROUPS)
def test_metric_axioms(G):
    X = stream(11, f"metrics/axioms/{G.describe()}").standard_normal(
        (32, G.ambient_dim))
    rep = metrics.check_metric_axioms(G, X)
    # self distances cancel catastrophically at zero: half precision only
    assert rep.worst_self <= 1e-6
    assert rep.worst_symmetry <= rep.tol
    assert rep.worst_triangle <= rep.tol
    assert rep.n_points == 32
    assert rep.n_triples > 0


@pytest.mark.parametrize("G", ALL_GROUPS)
def test_group_invariance(G):
    # moving either argument along its orbit leaves the distance unchanged
    rng = stream(12, f"metrics/invariance/{G.describe()}")
    x = rng.standard_normal(G.ambient_dim)
    y = rng.standard_normal(G.ambient_dim)
    base = metrics.quotient_dist(G, x, y)
    for g in groups.sample_elements(G, 6, rng):
        gx = groups.apply(G, g, x)
        assert abs(metrics.quotient_dist(G, gx, y) - base) <= 1e-9
        gy = groups.apply(G, g, y)
        assert abs(metrics.quotient_dist(G, x, gy) - base) <= 1e-9


def test_quotient_upper_bounds_by_plain_distance():
    # the quotient metric never exceeds the ambient distance
    rng = stream(13, "metrics/upper")
    for G in ALL_GROUPS:
        x = rng.standard_normal(G.ambient_dim)
        y = rng.standard_normal(G.ambient_dim)
        assert (metrics.quotient_dist(G, x, y)
                <= np.linalg.norm(x - y) + 1e-12)


def test_planar_rotation_matches_angle_scan():
    G = groups.planar_rotation(7)
    rng = stream(14, "metrics/planar")
    for _ in range(20):
        x = rng.standard_normal(2)
        y = rng.standard_normal(2)
        best = min(
            np.linalg.norm(x - _rot(2 * np.pi * j / 7) @ y) for j in range(7))
        assert abs(metrics.quotient_dist(G, x, y) - best) <= 1e-12


def _rot(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def test_phase_circle_matches_fine_grid():
    # min over unit phases of |x - e^{i t} y|; 20000-point grid brackets it
    G = groups.phase_circle(2)
    rng = stream(15, "metrics/phase")
    x = rng.standard_normal(4)
    y = rng.standard_normal(4)
    zx = groups.to_complex(x)
    zy = groups.to_complex(y)
    ts = np.linspace(0.0, 2 * np.pi, 20000, endpoint=False)
    grid = np.min([np.linalg.norm(zx - np.exp(1j * t) * zy) for t in ts])
    closed = metrics.quotient_dist(G, x, y)
    assert closed <= grid + 1e-12
    assert grid - closed <= 1e-6


def test_orthogonal_tuple_matches_fine_grid():
    # O(2) acting diagonally on a pair of planar points: scan rotations
    # and the reflected copy
    G = groups.orthogonal_tuple(2, 2)
    rng = stream(16, "metrics/tuple")
    x = rng.standard_normal(4)
    y = rng.standard_normal(4)
    Vx = x.reshape(2, 2)
    Vy = y.reshape(2, 2)
    best = np.inf
    flip = np.diag([1.0, -1.0])
    for t in np.linspace(0.0, 2 * np.pi, 20000, endpoint=False):
        R = _rot(t)
        best = min(best, np.linalg.norm(Vx - Vy @ R.T))
        best = min(best, np.linalg.norm(Vx - Vy @ (R @ flip).T))
    closed = metrics.quotient_dist(G, x, y)
    assert closed <= best + 1e-12
    assert best - closed <= 1e-6


def test_shape_group_matches_fine_grid():
    # O(2) x C_k: scan rotations and reflections for each cyclic shift
    k = 4
    G = groups.shape_group(k)
    rng = stream(17, "metrics/shape")
    x = rng.standard_normal(2 * k)
    y = rng.standard_normal(2 * k)
    Vx = x.reshape(k, 2)
    Vy = y.reshape(k, 2)
    best = np.inf
    flip = np.diag([1.0, -1.0])
    for shift in range(k):
        W = np.roll(Vy, shift, axis=0)
        for t in np.linspace(0.0, 2 * np.pi, 5000, endpoint=False):
            R = _rot(t)
            best = min(best, np.linalg.norm(Vx - W @ R.T))
            best = min(best, np.linalg.norm(Vx - W @ (R @ flip).T))
    closed = metrics.quotient_dist(G, x, y)
    assert closed <= best + 1e-12
    assert best - closed <= 1e-5


def test_condensed_layout_round_trip():
    n = 7
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            assert metrics.condensed_index(n, i, j) == idx
            assert metrics.condensed_pair(n, idx) == (i, j)
            idx += 1


def test_quotient_dist_matrix_agrees_with_pairs():
    G = groups.permutation(3)
    X = stream(18, "metrics/matrix").standard_normal((8, 3))
    cond = metrics.quotient_dist_matrix(G, X)
    assert cond.shape == (8 * 7 // 2,)
    square = metrics.quotient_dist_matrix(G, X, condensed=False)
    assert square.shape == (8, 8)
    for i in range(8):
        assert square[i, i] == 0.0
        for j in range(i + 1, 8):
            d = metrics.quotient_dist(G, X[i], X[j])
            assert abs(cond[metrics.condensed_index(8, i, j)] - d) <= 1e-12
            assert abs(square[i, j] - d) <= 1e-12
            assert square[i, j] == square[j, i]


def test_zero_distance_on_same_orbit():
    rng = stream(19, "metrics/zero")
    for G in ENUMERABLE:
        x = rng.standard_normal(G.ambient_dim)
        for g in groups.sample_elements(G, 4, rng):
            gx = groups.apply(G, g, x)
            assert metrics.quotient_dist(G, x, gx) <= 1e-7
