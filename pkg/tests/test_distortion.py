"""Empirical distortion reports and the perturbation inequality."""

import json

import numpy as np
import pytest

from orbitmap import distortion, embeddings, filters, groups
from orbitmap.config import stream


def test_isometry_reports_unit_distortion():
    G = groups.permutation(4)
    X = stream(60, "dist/iso").standard_normal((50, 4))
    rep = distortion.empirical_distortion(
        embeddings.weyl_sort_model("permutation", 4), G, X)
    assert rep.dist == pytest.approx(1.0, abs=1e-9)
    assert rep.alpha == pytest.approx(1.0, abs=1e-9)
    assert rep.beta == pytest.approx(1.0, abs=1e-9)
    assert rep.n_points == 50
    assert rep.n_pairs == 50 * 49 // 2
    assert rep.n_dropped == 0


def test_scaling_model_scales_constants_not_distortion():
    rng = stream(61, "dist/scale")
    G = groups.sign_flip(3)
    bank = filters.FilterBank(G, rng.standard_normal((4, 3)))
    L = rng.standard_normal((4, 4))
    X = rng.standard_normal((40, 3))
    rep1 = distortion.empirical_distortion(
        embeddings.linear_bank_model(filters.LinearMap(L), bank), G, X)
    rep3 = distortion.empirical_distortion(
        embeddings.linear_bank_model(filters.LinearMap(3.0 * L), bank), G, X)
    assert rep3.alpha == pytest.approx(3.0 * rep1.alpha, rel=1e-12)
    assert rep3.beta == pytest.approx(3.0 * rep1.beta, rel=1e-12)
    assert rep3.dist == pytest.approx(rep1.dist, rel=1e-12)
    assert rep3.argmin_pair == rep1.argmin_pair
    assert rep3.argmax_pair == rep1.argmax_pair


def test_coincident_orbit_pairs_are_dropped():
    rng = stream(62, "dist/drop")
    G = groups.sign_flip(3)
    x = rng.standard_normal(3)
    X = np.vstack([x, -x, rng.standard_normal((3, 3))])  # rows 0,1 same orbit
    model = embeddings.optimal_psd_model(3)
    rep = distortion.empirical_distortion(model, G, X)
    assert rep.n_dropped == 1
    assert rep.n_pairs == 5 * 4 // 2 - 1
    assert np.isfinite(rep.dist)


def test_all_coincident_raises():
    G = groups.sign_flip(2)
    x = np.array([1.0, 2.0])
    with pytest.raises(ValueError):
        distortion.empirical_distortion(
            embeddings.optimal_psd_model(2), G, np.vstack([x, -x]))
    with pytest.raises(ValueError):
        distortion.empirical_distortion(
            embeddings.optimal_psd_model(2), G, x[None, :])


def test_pair_ratios_mask_and_values():
    rng = stream(63, "dist/ratios")
    emb = rng.standard_normal((6, 2))
    quot = np.abs(rng.standard_normal(15)) + 0.1
    quot[3] = 0.0  # dropped pair
    ratios, mask = distortion.pair_ratios(emb, quot)
    assert mask.sum() == 14
    assert not mask[3]
    assert np.isnan(ratios[3])
    from scipy.spatial.distance import pdist
    want = pdist(emb)[0] / quot[0]
    assert ratios[0] == pytest.approx(want, rel=1e-12)


def test_report_serialization_round_trip():
    G = groups.permutation(3)
    X = stream(64, "dist/json").standard_normal((10, 3))
    rep = distortion.empirical_distortion(
        embeddings.weyl_sort_model("permutation", 3), G, X, seed=7)
    payload = json.loads(rep.to_json())
    assert payload["group"] == "permutation(3)"
    assert payload["seed"] == 7
    assert payload["n"] == 10
    assert payload["alpha"] == rep.alpha
    row = rep.csv_row()
    fields = row.split(",")
    assert len(fields) == len(distortion.DistortionReport.CSV_HEADER.split(","))
    assert float(fields[5]) == rep.dist


def test_weyl_check_bounds_constant_shifts():
    # perturbing a model by a linear map moves alpha and beta by at most
    # the Lipschitz norm of the difference, over any fixed pair set
    rng = stream(65, "dist/weyl")
    G = groups.sign_flip(3)
    X = rng.standard_normal((30, 3))
    bank = filters.FilterBank(G, rng.standard_normal((5, 3)))
    for _ in range(20):
        f = embeddings.linear_bank_model(
            filters.LinearMap(rng.standard_normal((5, 5))), bank)
        g = embeddings.linear_bank_model(
            filters.LinearMap(rng.standard_normal((5, 5))), bank)
        rep = distortion.weyl_check(f, g, G, X)
        assert rep.margin >= -1e-10
        assert rep.ok()
        assert rep.margin == min(rep.margin_alpha, rep.margin_beta)
        d = rep.to_dict()
        assert set(d) == {"alpha_f", "beta_f", "alpha_g", "beta_g",
                          "beta_diff", "margin_alpha", "margin_beta"}


def test_weyl_check_identical_models_zero_margin_side():
    rng = stream(66, "dist/weyl-id")
    G = groups.sign_flip(2)
    X = rng.standard_normal((20, 2))
    bank = filters.FilterBank(G, rng.standard_normal((3, 2)))
    f = embeddings.bank_model(bank)
    rep = distortion.weyl_check(f, f, G, X)
    # identical models: the difference map is zero and both deltas vanish
    assert rep.beta_diff == pytest.approx(0.0, abs=1e-12)
    assert rep.alpha_f == rep.alpha_g
    assert rep.beta_f == rep.beta_g
    assert rep.margin >= -1e-12


def test_weyl_check_rejects_mismatched_dims():
    rng = stream(67, "dist/weyl-dim")
    G = groups.sign_flip(2)
    X = rng.standard_normal((10, 2))
    bank = filters.FilterBank(G, rng.standard_normal((3, 2)))
    f = embeddings.bank_model(bank)
    g = embeddings.linear_bank_model(
        filters.LinearMap(rng.standard_normal((2, 3))), bank)
    with pytest.raises(ValueError):
        distortion.weyl_check(f, g, G, X)
