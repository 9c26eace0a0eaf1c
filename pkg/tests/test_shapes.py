"""Polygon pipeline: synthesis, resampling, IO, embedding invariance, PCA, SVG."""

import json
import os

import numpy as np
import pytest

from orbitmap import embeddings, filters, groups, shapes
from orbitmap.config import stream


def test_synth_shapes_families_and_determinism():
    got = shapes.synth_shapes(9, seed=4, dense=64)
    assert len(got) == 9
    assert {s.label for s in got} == {"ellipse", "star", "blob"}
    assert all(s.vertices.shape == (64, 2) for s in got)
    ids = [s.shape_id for s in got]
    assert len(set(ids)) == 9
    again = shapes.synth_shapes(9, seed=4, dense=64)
    for a, b in zip(got, again):
        assert a.shape_id == b.shape_id
        assert np.array_equal(a.vertices, b.vertices)
    other = shapes.synth_shapes(9, seed=5, dense=64)
    assert not np.array_equal(got[0].vertices, other[0].vertices)


def test_polygon_shape_validation():
    with pytest.raises(ValueError):
        shapes.PolygonShape("x", "y", np.zeros((2, 2)))  # needs 3+ vertices
    with pytest.raises(ValueError):
        shapes.PolygonShape("x", "y", np.zeros((4, 3)))  # planar only


def test_resample_closed_preserves_perimeter_and_start():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    out = shapes.resample_closed(square, 16)
    assert out.shape == (16, 2)
    assert np.allclose(out[0], square[0])

    def perim(V):
        return float(np.linalg.norm(np.roll(V, -1, axis=0) - V, axis=1).sum())

    assert perim(out) == pytest.approx(perim(square), rel=1e-9)
    # equally spaced in arclength: consecutive gaps are constant
    gaps = np.linalg.norm(np.roll(out, -1, axis=0) - out, axis=1)
    assert np.allclose(gaps, gaps[0], atol=1e-9)


def test_resample_closed_fixed_point_on_equal_chords():
    # resampling is exactly idempotent once the vertices are equally
    # spaced in arclength (equal chords), e.g. any regular polygon
    t = 2 * np.pi * np.arange(48) / 48
    circle48 = np.stack([np.cos(t), np.sin(t)], axis=1)
    dodecagon = shapes.resample_closed(circle48, 12)
    # equal steps land on every fourth original vertex
    assert np.allclose(dodecagon, circle48[::4], atol=1e-12)
    again = shapes.resample_closed(dodecagon, 12)
    assert np.allclose(again, dodecagon, atol=1e-12)


def test_resample_closed_general_polygons_drift_is_bounded():
    # on irregular polygons resampling is contractive, not idempotent:
    # points move by less than one chord length per pass
    rng = stream(80, "shapes/idem")
    t = np.sort(rng.uniform(0, 2 * np.pi, 12))
    V = np.stack([np.cos(t), np.sin(t)], axis=1) \
        * (1 + 0.2 * rng.uniform(size=12))[:, None]
    once = shapes.resample_closed(V, 20)
    twice = shapes.resample_closed(once, 20)
    max_gap = np.linalg.norm(np.roll(once, -1, axis=0) - once, axis=1).max()
    assert np.max(np.linalg.norm(twice - once, axis=1)) < max_gap


def test_preprocess_centers_and_resamples():
    raw = shapes.synth_shapes(1, seed=1, dense=128)[0]
    out = shapes.preprocess(raw, 24)
    assert out.vertices.shape == (24, 2)
    assert np.allclose(out.vertices.mean(axis=0), 0.0, atol=1e-12)
    assert out.shape_id == raw.shape_id and out.label == raw.label


def test_shapes_to_matrix_row_major():
    s = shapes.PolygonShape("a", "b",
                            np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]))
    X = shapes.shapes_to_matrix([s])
    assert np.array_equal(X, [[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]])


def test_csv_round_trip_with_ragged_rows(tmp_path):
    tri = shapes.PolygonShape("t", "tri",
                              np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    quad = shapes.PolygonShape("q", "quad",
                               np.array([[0.0, 0.0], [2.0, 0.0],
                                         [2.0, 2.0], [0.0, 2.0]]))
    path = tmp_path / "mixed.csv"
    shapes.write_shapes_csv([tri, quad], str(path))
    back = shapes.read_polygons_csv(str(path))
    assert [s.k for s in back] == [3, 4]
    assert back[0].label == "tri" and back[1].label == "quad"
    assert np.allclose(back[1].vertices, quad.vertices)


def test_geojson_reader(tmp_path):
    gj = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature",
             "properties": {"name": "tri"},
             "geometry": {"type": "Polygon", "coordinates": [
                 [[0, 0], [4, 0], [0, 4], [0, 0]]]}},
            {"type": "Feature",
             "properties": {"name": "multi"},
             "geometry": {"type": "MultiPolygon", "coordinates": [
                 [[[0, 0], [1, 0], [0, 1], [0, 0]]],
                 [[[0, 0], [5, 0], [5, 5], [0, 5], [0, 0]]]]}},
            {"type": "Feature",
             "properties": {"name": "pt"},
             "geometry": {"type": "Point", "coordinates": [1, 2]}},
        ],
    }
    path = tmp_path / "areas.geojson"
    path.write_text(json.dumps(gj))
    got, rejected = shapes.read_polygons_geojson(str(path), label_field="name")
    assert rejected == 1  # the point geometry
    assert len(got) == 2
    assert got[0].label == "tri"
    # closing duplicate vertex dropped
    assert got[0].k == 3
    # the larger ring of the multipolygon wins
    assert got[1].k == 4
    assert np.max(np.abs(got[1].vertices)) == pytest.approx(5.0)


def test_shape_embed_requires_matching_group():
    sh = [shapes.preprocess(s, 8) for s in shapes.synth_shapes(3, seed=0)]
    wrong = embeddings.optimal_psd_model(16)
    with pytest.raises(ValueError):
        shapes.shape_embed(wrong, sh)


def test_shape_embed_and_invariance_untrained_bank():
    # max filter banks are invariant by construction, trained or not
    k = 12
    sh = [shapes.preprocess(s, k) for s in shapes.synth_shapes(12, seed=2)]
    G = groups.shape_group(k)
    rng = stream(81, "shapes/bank")
    model = embeddings.bank_model(
        filters.FilterBank(G, rng.standard_normal((6, 2 * k))))
    F = shapes.shape_embed(model, sh)
    assert F.shape == (12, 6)
    inv = shapes.embedding_invariance(model, sh, seed=0)
    assert inv <= 1e-8


def test_embedding_csv_round_trip(tmp_path):
    sh = [shapes.preprocess(s, 8) for s in shapes.synth_shapes(5, seed=3)]
    F = stream(82, "shapes/embcsv").standard_normal((5, 4))
    path = tmp_path / "emb.csv"
    shapes.write_embedding_csv(sh, F, str(path))
    meta, back = shapes.read_embedding_csv(str(path))
    assert np.allclose(back, F)
    assert [m[0] for m in meta] == [s.shape_id for s in sh]
    assert [m[1] for m in meta] == [s.label for s in sh]


def test_pca_project_properties():
    rng = stream(83, "shapes/pca")
    # anisotropic cloud: first axis dominates
    F = rng.standard_normal((40, 5)) * np.array([5.0, 2.0, 0.5, 0.1, 0.05])
    res = shapes.pca_project(F, dim=3)
    assert res.coords.shape == (40, 3)
    assert res.components.shape == (3, 5)
    assert res.explained[0] >= res.explained[1] >= res.explained[2]
    assert res.explained.sum() <= 1.0 + 1e-12
    assert res.explained[0] >= 0.7
    # centered scores and the stated mean reproduce the projection
    want = (F - res.mean) @ res.components.T
    assert np.allclose(res.coords, want, atol=1e-10)
    # sign convention: each component's largest-magnitude loading is positive
    for row in res.components:
        assert row[np.argmax(np.abs(row))] > 0


def test_pca_csv_has_explained_variance_comment(tmp_path):
    sh = [shapes.preprocess(s, 8) for s in shapes.synth_shapes(6, seed=1)]
    F = stream(84, "shapes/pcacsv").standard_normal((6, 5))
    res = shapes.pca_project(F, dim=2)
    path = tmp_path / "pca.csv"
    shapes.write_pca_csv(sh, res, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "id,class,pc0,pc1"
    assert lines[-1].startswith("# explained,")
    got = [float(v) for v in lines[-1].split(",")[1:]]
    assert np.allclose(got, res.explained)
    assert len(lines) == 1 + 6 + 1


def test_svg_scatter_writes_markers(tmp_path):
    sh = [shapes.preprocess(s, 8) for s in shapes.synth_shapes(7, seed=5)]
    coords = stream(85, "shapes/svg").standard_normal((7, 2))
    path = tmp_path / "scatter.svg"
    shapes.svg_scatter(sh, coords, str(path))
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    # one marker per shape plus a legend dot per family
    assert text.count("<circle") == 7 + 3
    assert text.count("<text") == 3
    # every marker is identified by its shape id
    for s in sh:
        assert f"<title>{s.shape_id}</title>" in text
    # the three families use three distinct palette colors
    used = {c for c in shapes.PALETTE if c in text}
    assert len(used) == 3


def test_svg_scatter_accepts_meta_tuples(tmp_path):
    meta = [("a", "ellipse"), ("b", "star")]
    coords = np.array([[0.0, 0.0], [1.0, 1.0]])
    path = tmp_path / "meta.svg"
    shapes.svg_scatter(meta, coords, str(path))
    text = path.read_text()
    assert text.startswith("<svg")
    # two markers plus two legend dots
    assert text.count("<circle") == 4
    assert text.count("<text") == 2
