"""Planar polygon shapes as points of an orbit space.

A closed polygon with k boundary samples, centered at the origin, is a
k x 2 matrix; re-centering kills translations, and what remains of
"same shape" is the compact group O(2) x C_k acting by rotating or
reflecting the plane and cyclically relabeling the boundary samples.
Embedding the resulting orbit space with a trained model turns shape
collections into plain Euclidean point clouds.

The pipeline: ingest raw polygons (CSV rows or GeoJSON rings),
resample each boundary to a fixed k by arclength from its first
vertex, center, embed with a shape-group model, then project with PCA
for plotting.  File writers are atomic (tempfile + rename).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import config as cfg_mod
from . import groups

PALETTE = (
    "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
    "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0",
)


@dataclass
class PolygonShape:
    """A closed polygon: id, class label, and (k, 2) vertex array."""

    shape_id: str
    label: str
    vertices: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=np.float64)
        if V.ndim != 2 or V.shape[1] != 2 or V.shape[0] < 3:
            raise ValueError(f"vertices must be (k >= 3, 2), got {V.shape}")
        self.vertices = V

    @property
    def k(self) -> int:
        return self.vertices.shape[0]


# ---------------------------------------------------------------------------
# ingest

def read_polygons_csv(path) -> list:
    """Rows ``id,class,x0,y0,x1,y1,...`` (vertex counts may vary by row)."""
    shapes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if lineno == 1 and parts[:2] == ["id", "class"]:
                continue
            if len(parts) < 8 or len(parts) % 2 != 0:
                raise ValueError(
                    f"line {lineno}: expected id,class and >= 3 coordinate pairs"
                )
            coords = np.array([float(v) for v in parts[2:]]).reshape(-1, 2)
            shapes.append(PolygonShape(parts[0], parts[1], coords))
    return shapes


def read_polygons_geojson(path, label_field: str = "") -> tuple:
    """Outer rings of Polygon/MultiPolygon features.

    MultiPolygons contribute their largest-area outer ring.  Features
    with any other geometry are rejected; returns (shapes, n_rejected).
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    features = doc["features"] if doc.get("type") == "FeatureCollection" else [doc]
    shapes, rejected = [], 0
    for i, feat in enumerate(features):
        geom = feat.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "Polygon":
            ring = geom["coordinates"][0]
        elif gtype == "MultiPolygon":
            ring = max(
                (poly[0] for poly in geom["coordinates"]),
                key=lambda r: abs(_ring_area(np.asarray(r, dtype=np.float64))),
            )
        else:
            rejected += 1
            continue
        V = np.asarray(ring, dtype=np.float64)[:, :2]
        if V.shape[0] > 3 and np.allclose(V[0], V[-1]):
            V = V[:-1]  # drop the GeoJSON closing duplicate
        props = feat.get("properties") or {}
        sid = str(feat.get("id", props.get("id", props.get("GEOID", i))))
        label = str(props.get(label_field, "")) if label_field else ""
        shapes.append(PolygonShape(sid, label, V))
    return shapes, rejected


def _ring_area(V: np.ndarray) -> float:
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# resampling

def resample_closed(vertices: np.ndarray, k: int) -> np.ndarray:
    """k boundary points at uniform arclength, starting at vertex 0.

    The polygon is traversed as a closed piecewise-linear curve (the
    closing edge back to vertex 0 included); targets sit at arclengths
    j * L / k, so the first output point is exactly vertex 0.
    """
    V = np.asarray(vertices, dtype=np.float64)
    if k < 3:
        raise ValueError("k must be >= 3")
    closed = np.vstack([V, V[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0.0:
        raise ValueError("degenerate polygon with zero perimeter")
    breaks = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.arange(k) * total / k
    out = np.empty((k, 2))
    out[:, 0] = np.interp(targets, breaks, closed[:, 0])
    out[:, 1] = np.interp(targets, breaks, closed[:, 1])
    return out


def preprocess(shape: PolygonShape, k: int) -> PolygonShape:
    """Resample to k vertices and center at the vertex mean."""
    V = resample_closed(shape.vertices, k)
    V = V - V.mean(axis=0)
    return PolygonShape(shape.shape_id, shape.label, V)


# ---------------------------------------------------------------------------
# synthetic families

def synth_shapes(n: int, seed: int = 0, dense: int = 256) -> list:
    """n synthetic polygons cycling through three boundary families.

    ellipse: axis ratios in [0.35, 0.95]; star: 5-7 lobes of depth
    [0.25, 0.5]; blob: random low-order trigonometric radius.  Every
    shape gets a random rotation, boundary phase, and mild scale jitter,
    so the raw coordinates carry the full nuisance group.
    """
    rng = cfg_mod.stream(seed, "shapes/synth")
    t = np.linspace(0.0, 2.0 * np.pi, dense, endpoint=False)
    shapes = []
    for i in range(n):
        fam = ("ellipse", "star", "blob")[i % 3]
        if fam == "ellipse":
            b = rng.uniform(0.35, 0.95)
            r = 1.0 / np.sqrt(np.cos(t) ** 2 + (np.sin(t) / b) ** 2)
        elif fam == "star":
            lobes = int(rng.integers(5, 8))
            amp = rng.uniform(0.25, 0.5)
            r = 1.0 + amp * np.cos(lobes * t)
        else:
            r = np.ones_like(t)
            for j in range(1, 4):
                r += rng.uniform(0.05, 0.2) * np.cos(j * t + rng.uniform(0, 2 * np.pi))
        scale = rng.uniform(0.8, 1.25)
        rot = rng.uniform(0.0, 2.0 * np.pi)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        x = scale * r * np.cos(t + phase)
        y = scale * r * np.sin(t + phase)
        c, s = np.cos(rot), np.sin(rot)
        V = np.stack([c * x - s * y, s * x + c * y], axis=1)
        shapes.append(PolygonShape(f"{fam}-{i:04d}", fam, V))
    return shapes


# ---------------------------------------------------------------------------
# embedding and PCA

def shapes_to_matrix(shapes) -> np.ndarray:
    """Stack (k, 2) vertex arrays into rows of R^{2k} (x0,y0,x1,y1,...)."""
    ks = {s.k for s in shapes}
    if len(ks) != 1:
        raise ValueError(f"shapes have mixed vertex counts {sorted(ks)}")
    return np.stack([s.vertices.reshape(-1) for s in shapes])


def shape_embed(model, shapes) -> np.ndarray:
    """Embed preprocessed shapes; the model must act on shape_group(k)."""
    G = model.group
    if G is None or G.kind != "shape_group":
        raise ValueError("model does not act on a polygon shape group")
    X = shapes_to_matrix(shapes)
    if X.shape[1] != G.ambient_dim:
        raise groups.DimensionMismatchError(
            f"shapes have k = {X.shape[1] // 2}, model expects k = {G.k}"
        )
    return model.batch(X)


def embedding_invariance(model, shapes, seed: int = 0) -> float:
    """Worst embedding deviation under random shape-group motions."""
    G = model.group
    rng = cfg_mod.stream(seed, "shapes/invariance")
    X = shapes_to_matrix(shapes)
    F = model.batch(X)
    worst = 0.0
    for g in groups.sample_elements(G, len(shapes), rng):
        i = int(rng.integers(0, X.shape[0]))
        moved = groups.apply(G, g, X[i])
        worst = max(worst, float(np.linalg.norm(model(moved) - F[i])))
    return worst


@dataclass
class PCAResult:
    coords: np.ndarray
    explained: np.ndarray
    components: np.ndarray
    mean: np.ndarray


def pca_project(F: np.ndarray, dim: int = 2) -> PCAResult:
    """Centered SVD projection onto the top principal directions.

    Each component's sign is fixed so its largest-magnitude loading is
    positive; ``explained`` is the fraction of total variance per kept
    component.
    """
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2:
        raise ValueError("F must be (n, m)")
    dim = min(dim, *F.shape)
    mean = F.mean(axis=0)
    C = F - mean
    U, S, Vt = np.linalg.svd(C, full_matrices=False)
    comps = Vt[:dim]
    for j in range(dim):
        pivot = int(np.argmax(np.abs(comps[j])))
        if comps[j, pivot] < 0:
            comps[j] = -comps[j]
    coords = C @ comps.T
    var = S ** 2
    total = float(var.sum())
    explained = var[:dim] / total if total > 0 else np.zeros(dim)
    return PCAResult(coords=coords, explained=explained, components=comps, mean=mean)


# ---------------------------------------------------------------------------
# writers (atomic)

def write_shapes_csv(shapes, path) -> None:
    k = shapes[0].k if shapes else 0
    header = "id,class," + ",".join(f"x{i},y{i}" for i in range(k))
    lines = [header]
    for s in shapes:
        flat = ",".join(repr(float(v)) for v in s.vertices.reshape(-1))
        lines.append(f"{s.shape_id},{s.label},{flat}")
    cfg_mod.atomic_write_text(path, "\n".join(lines) + "\n")


def _meta(s) -> tuple:
    # writers accept PolygonShape objects or plain (id, label) pairs
    if hasattr(s, "shape_id"):
        return s.shape_id, s.label
    return s[0], s[1]


def write_embedding_csv(shapes, F: np.ndarray, path) -> None:
    m = F.shape[1]
    header = "id,class," + ",".join(f"f{i}" for i in range(m))
    lines = [header]
    for s, row in zip(shapes, F):
        sid, lab = _meta(s)
        lines.append(f"{sid},{lab}," + ",".join(repr(float(v)) for v in row))
    cfg_mod.atomic_write_text(path, "\n".join(lines) + "\n")


def read_embedding_csv(path) -> tuple:
    """Read an embedding CSV back into (id/label pairs, feature matrix)."""
    meta, rows = [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["id", "class"]:
            raise ValueError("embedding CSV must start with id,class columns")
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            meta.append((parts[0], parts[1]))
            rows.append([float(v) for v in parts[2:]])
    return meta, np.asarray(rows, dtype=np.float64)


def write_pca_csv(shapes, result: PCAResult, path) -> None:
    dim = result.coords.shape[1]
    header = "id,class," + ",".join(f"pc{i}" for i in range(dim))
    lines = [header]
    for s, row in zip(shapes, result.coords):
        sid, lab = _meta(s)
        lines.append(f"{sid},{lab}," + ",".join(repr(float(v)) for v in row))
    lines.append("# explained," + ",".join(repr(float(v)) for v in result.explained))
    cfg_mod.atomic_write_text(path, "\n".join(lines) + "\n")


def svg_scatter(shapes, coords: np.ndarray, path, size: int = 640) -> None:
    """Static SVG scatter of the first two columns, colored by class."""
    coords = np.asarray(coords, dtype=np.float64)
    xy = coords[:, :2]
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    margin = 0.08 * size
    inner = size - 2 * margin

    def to_px(p):
        u = (p - lo) / span
        return margin + u[0] * inner, size - margin - u[1] * inner

    metas = [_meta(s) for s in shapes]
    labels = sorted({lab for _, lab in metas})
    color = {lab: PALETTE[i % len(PALETTE)] for i, lab in enumerate(labels)}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{inner:.1f}" height="{inner:.1f}" '
        'fill="none" stroke="#d0d0d0"/>',
    ]
    for (sid, lab), p in zip(metas, xy):
        px, py = to_px(p)
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3.5" fill="{color[lab]}" '
            f'fill-opacity="0.75"><title>{sid}</title></circle>'
        )
    for i, lab in enumerate(labels):
        ly = margin + 16 + 18 * i
        parts.append(
            f'<circle cx="{margin + 12:.1f}" cy="{ly}" r="5" fill="{color[lab]}"/>'
        )
        parts.append(
            f'<text x="{margin + 24:.1f}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="13">{lab or "(unlabeled)"}</text>'
        )
    parts.append("</svg>")
    cfg_mod.atomic_write_text(path, "\n".join(parts) + "\n")
