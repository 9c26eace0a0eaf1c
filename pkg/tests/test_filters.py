"""Max filter banks: invariance, homogeneity, subgradients, sorting bank."""

import numpy as np
import pytest

from orbitmap import filters, groups
from orbitmap.config import stream

GROUPS = [
    groups.sign_flip(3),
    groups.hyperoctahedral_signs(3),
    groups.permutation(4),
    groups.cyclic_shift(4),
    groups.planar_rotation(5),
    groups.phase_circle(2),
    groups.orthogonal_tuple(2, 2),
    groups.shape_group(4),
]


def _bank(G, m, rng):
    return filters.FilterBank(G, rng.standard_normal((m, G.ambient_dim)))


@pytest.mark.parametrize("G", GROUPS)
def test_bank_invariance(G):
    rng = stream(21, f"filters/inv/{G.describe()}")
    bank = _bank(G, 3, rng)
    x = rng.standard_normal(G.ambient_dim)
    base = filters.bank_apply(bank, x)
    for g in groups.sample_elements(G, 6, rng):
        moved = filters.bank_apply(bank, groups.apply(G, g, x))
        assert np.allclose(moved, base, atol=1e-9)


@pytest.mark.parametrize("G", GROUPS)
def test_bank_positive_homogeneity(G):
    rng = stream(22, f"filters/homog/{G.describe()}")
    bank = _bank(G, 3, rng)
    x = rng.standard_normal(G.ambient_dim)
    base = filters.bank_apply(bank, x)
    for c in (0.0, 0.5, 2.0, 7.5):
        assert np.allclose(filters.bank_apply(bank, c * x), c * base,
                           atol=1e-10)


@pytest.mark.parametrize("G", GROUPS)
def test_bank_batch_matches_single(G):
    rng = stream(23, f"filters/batch/{G.describe()}")
    bank = _bank(G, 4, rng)
    X = rng.standard_normal((10, G.ambient_dim))
    F = filters.bank_batch(bank, X)
    assert F.shape == (10, 4)
    for i in range(10):
        assert np.allclose(F[i], filters.bank_apply(bank, X[i]), atol=1e-12)


def test_max_filter_is_symmetric_pairing():
    # <<[x],[y]>> = <<[y],[x]>> since g ranges over a group
    rng = stream(24, "filters/sym")
    for G in GROUPS:
        x = rng.standard_normal(G.ambient_dim)
        y = rng.standard_normal(G.ambient_dim)
        assert (filters.max_filter(G, y, x)
                == pytest.approx(filters.max_filter(G, x, y), abs=1e-10))


def test_sorting_bank_cumulative_sums():
    # template i is the sum of i+1 standard basis vectors; its max filter
    # returns the sum of the i+1 largest coordinates
    rng = stream(25, "filters/sort")
    d = 5
    bank = filters.sort_bank(d)
    x = rng.standard_normal(d)
    vals = filters.bank_apply(bank, x)
    top = -np.sort(-x)
    assert np.allclose(vals, np.cumsum(top), atol=1e-12)


def test_sort_recovery_inverts_cumulative_sums():
    rng = stream(26, "filters/sortrec")
    d = 6
    bank = filters.sort_bank(d)
    L = filters.sort_recovery(d)
    X = rng.standard_normal((50, d))
    F = filters.bank_batch(bank, X) @ L.matrix.T
    assert np.allclose(F, -np.sort(-X, axis=1), atol=1e-12)


@pytest.mark.parametrize("G", GROUPS)
def test_subgradient_matches_finite_differences(G):
    # tie gaps are only defined over finite groups; continuous max filters
    # are smooth off a null set, so just require most samples to agree
    rng = stream(27, f"filters/subgrad/{G.describe()}")
    bank = _bank(G, 3, rng)
    d = G.ambient_dim
    h = 1e-6
    checked = agreed = 0
    for _ in range(10):
        x = rng.standard_normal(d)
        if G.is_finite and filters.bank_tie_gap(bank, x) < 1e-4:
            continue  # kink: the subgradient is one-sided there
        sub = filters.bank_subgradient(bank, x)
        assert sub.shape == (3, d)
        fd = np.empty_like(sub)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd[:, j] = (filters.bank_apply(bank, x + e)
                        - filters.bank_apply(bank, x - e)) / (2 * h)
        if np.max(np.abs(sub - fd)) <= 1e-5:
            agreed += 1
        checked += 1
    assert checked >= 5
    assert agreed >= 0.8 * checked


def test_subgradient_rows_are_aligned_templates():
    # row i of the subgradient is g* y_i, so <x, row_i> equals the value
    rng = stream(28, "filters/alignrows")
    for G in GROUPS:
        bank = _bank(G, 3, rng)
        x = rng.standard_normal(G.ambient_dim)
        sub = filters.bank_subgradient(bank, x)
        vals = filters.bank_apply(bank, x)
        assert np.allclose(sub @ x, vals, atol=1e-9)
        # aligned templates stay on their orbits: norms match
        assert np.allclose(np.linalg.norm(sub, axis=1),
                           np.linalg.norm(bank.templates, axis=1), atol=1e-9)


def test_aligned_inputs_realize_values():
    # row i of the template-side subgradient is g*^{-1} x: pairing it with
    # template i gives the bank value, and its norm is |x|
    rng = stream(29, "filters/aligned")
    for G in GROUPS:
        bank = _bank(G, 3, rng)
        x = rng.standard_normal(G.ambient_dim)
        aligned = filters.bank_aligned_inputs(bank, x)
        vals = filters.bank_apply(bank, x)
        got = np.einsum("md,md->m", aligned, bank.templates)
        assert np.allclose(got, vals, atol=1e-9)
        assert np.allclose(np.linalg.norm(aligned, axis=1),
                           np.linalg.norm(x), atol=1e-9)


def test_subgradient_batch_matches_loop():
    rng = stream(30, "filters/subbatch")
    G = groups.permutation(4)
    bank = _bank(G, 3, rng)
    X = rng.standard_normal((8, 4))
    batch = filters.bank_subgradient_batch(bank, X)
    assert batch.shape == (8, 3, 4)
    for i in range(8):
        assert np.allclose(batch[i], filters.bank_subgradient(bank, X[i]),
                           atol=1e-12)


def test_tie_gap_zero_at_ties():
    G = groups.permutation(2)
    bank = filters.FilterBank(G, np.array([[2.0, 1.0]]))
    # equal coordinates: both permutations attain the max
    assert filters.bank_tie_gap(bank, np.array([1.0, 1.0])) == pytest.approx(0.0)
    assert filters.bank_tie_gap(bank, np.array([3.0, 1.0])) > 0.1
    gaps = filters.bank_tie_gaps(bank, np.array([[1.0, 1.0], [3.0, 1.0]]))
    assert gaps[0] == pytest.approx(0.0)
    assert gaps[1] > 0.1


def test_lmf_apply_is_linear_readout():
    rng = stream(31, "filters/lmf")
    G = groups.sign_flip(3)
    bank = _bank(G, 4, rng)
    L = filters.LinearMap(rng.standard_normal((2, 4)))
    x = rng.standard_normal(3)
    assert np.allclose(filters.lmf_apply(L, bank, x),
                       L.matrix @ filters.bank_apply(bank, x))
    X = rng.standard_normal((6, 3))
    assert np.allclose(filters.lmf_batch(L, bank, X),
                       filters.bank_batch(bank, X) @ L.matrix.T)


def test_bank_json_round_trip():
    rng = stream(32, "filters/json")
    for G in (groups.sign_flip(3), groups.shape_group(4)):
        bank = _bank(G, 3, rng)
        back = filters.FilterBank.from_json(bank.to_json())
        assert back.group.describe() == G.describe()
        assert np.allclose(back.templates, bank.templates)


def test_bank_rejects_wrong_width():
    with pytest.raises(groups.DimensionMismatchError):
        filters.FilterBank(groups.sign_flip(3), np.ones((2, 4)))
