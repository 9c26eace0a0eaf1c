"""Invariant embeddings: optimal closed forms, polynomial invariants,
and the tagged model wrapper used by evaluation, training and the CLI.

Closed-form optimal maps
------------------------
optimal_planar(r, x)   R^2 / C_r -> R^3, Euclidean distortion r sin(pi/2r)
optimal_psd(x)         R^d / {+-I} -> sym matrices, x x^T / |x|, distortion sqrt(2)
weyl_sort(kind, x)     reflection-group chamber representative, an isometry
                       for the sorted-coordinates quotient

Polynomial invariants (one row per group kind)
----------------------------------------------
sign_flip          x x^T                      (d+1 choose 2) coords
permutation        power sums sum x_j^k       d coords
cyclic_shift       bispectrum xh(a) xh(b) xh(-a-b)   2 d^2 coords
planar_rotation    z^r on C = R^2             2 coords
phase_circle       x x^* on C^d               d^2 coords
orthogonal_tuple   Gram matrix <x_i, x_j>     (k+1 choose 2) coords

Symmetric and Hermitian matrices are flattened isometrically: upper
triangle with off-diagonal entries scaled by sqrt(2) (real and
imaginary parts separately in the Hermitian case), so Euclidean norm
equals Frobenius norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import filters, groups
from .filters import FilterBank, LinearMap
from .groups import GroupSpec

SQRT2 = float(np.sqrt(2.0))


# ---------------------------------------------------------------------------
# symmetric / Hermitian flattening

def sym_flatten(M: np.ndarray) -> np.ndarray:
    """Isometric flattening of symmetric matrices (batched on leading axes)."""
    d = M.shape[-1]
    iu, ju = np.triu_indices(d)
    scale = np.where(iu == ju, 1.0, SQRT2)
    return M[..., iu, ju] * scale


def herm_flatten(M: np.ndarray) -> np.ndarray:
    """Isometric flattening of Hermitian matrices to d^2 real coordinates."""
    d = M.shape[-1]
    diag = M[..., np.arange(d), np.arange(d)].real
    iu, ju = np.triu_indices(d, 1)
    off = M[..., iu, ju]
    return np.concatenate(
        [diag, SQRT2 * off.real, SQRT2 * off.imag], axis=-1
    )


# ---------------------------------------------------------------------------
# optimal closed forms

def optimal_planar(r: int, x) -> np.ndarray:
    """Embedding of R^2 / C_r into R^3 with distortion r sin(pi / 2r).

    h(x) = |x| (cos(pi/2r), Re(w), Im(w)) with w = (x1 + i x2)^r / |x|^r
    scaled by sin(pi/2r); h(0) = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != 2:
        raise groups.DimensionMismatchError("optimal_planar acts on R^2")
    nrm = np.linalg.norm(X, axis=1)
    z = X[:, 0] + 1j * X[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        phase = np.where(nrm > 0.0, z / np.where(nrm > 0, nrm, 1.0), 0.0)
    w = phase**r
    c = np.cos(np.pi / (2.0 * r))
    s = np.sin(np.pi / (2.0 * r))
    out = np.stack([nrm * c, nrm * s * w.real, nrm * s * w.imag], axis=1)
    return out[0] if single else out


def optimal_planar_distortion(r: int) -> float:
    """Euclidean distortion of ``optimal_planar``: r sin(pi / 2r)."""
    return float(r * np.sin(np.pi / (2.0 * r)))


def optimal_psd(x) -> np.ndarray:
    """Matrix square root embedding x -> x x^T / |x| of R^d / {+-I}.

    Returned flattened isometrically; h(0) = 0.  Bilipschitz with
    alpha = 1, beta = sqrt(2).
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    nrm = np.linalg.norm(X, axis=1)
    safe = np.where(nrm > 0.0, nrm, 1.0)
    M = np.einsum("ni,nj->nij", X, X) / safe[:, None, None]
    out = sym_flatten(M)
    out[nrm == 0.0] = 0.0
    return out[0] if single else out


WEYL_KINDS = ("permutation", "hyperoctahedral_signs")


def weyl_sort(kind: str, x) -> np.ndarray:
    """Chamber representative of the orbit of x.

    permutation            coordinates sorted weakly decreasing
    hyperoctahedral_signs  absolute values sorted weakly decreasing
                           (the chamber of the full signed-permutation
                           group; constant on sign-flip orbits)
    """
    if kind not in WEYL_KINDS:
        raise ValueError(f"weyl_sort supports {WEYL_KINDS}, got {kind!r}")
    x = np.asarray(x, dtype=np.float64)
    X = np.atleast_2d(x)
    if kind == "hyperoctahedral_signs":
        X = np.abs(X)
    out = -np.sort(-X, axis=1)
    return out[0] if x.ndim == 1 else out


# ---------------------------------------------------------------------------
# polynomial invariants, one row per group kind

POLY_KINDS = (
    "sign_flip",
    "permutation",
    "cyclic_shift",
    "planar_rotation",
    "phase_circle",
    "orthogonal_tuple",
)


def poly_output_dim(G: GroupSpec) -> int:
    if G.kind == "sign_flip":
        return G.d * (G.d + 1) // 2
    if G.kind == "permutation":
        return G.d
    if G.kind == "cyclic_shift":
        return 2 * G.d * G.d
    if G.kind == "planar_rotation":
        return 2
    if G.kind == "phase_circle":
        return G.d * G.d
    if G.kind == "orthogonal_tuple":
        return G.k * (G.k + 1) // 2
    raise ValueError(f"no polynomial invariant row for kind {G.kind!r}")


def poly_invariant(G: GroupSpec, x) -> np.ndarray:
    """Classical separating polynomial invariant for the group kind."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != G.ambient_dim:
        raise groups.DimensionMismatchError(
            f"{G.describe()} acts on R^{G.ambient_dim}, got width {X.shape[1]}"
        )

    if G.kind == "sign_flip":
        out = sym_flatten(np.einsum("ni,nj->nij", X, X))
    elif G.kind == "permutation":
        out = np.stack([np.sum(X**k, axis=1) for k in range(1, G.d + 1)], axis=1)
    elif G.kind == "cyclic_shift":
        F = np.fft.fft(X, axis=1)
        a = np.arange(G.d)
        pair_a, pair_b = np.meshgrid(a, a, indexing="ij")
        third = (-pair_a - pair_b) % G.d
        B = F[:, pair_a.ravel()] * F[:, pair_b.ravel()] * F[:, third.ravel()]
        out = np.concatenate([B.real, B.imag], axis=1)
    elif G.kind == "planar_rotation":
        z = (X[:, 0] + 1j * X[:, 1]) ** G.r
        out = np.stack([z.real, z.imag], axis=1)
    elif G.kind == "phase_circle":
        Z = groups.to_complex(X)
        M = np.einsum("ni,nj->nij", Z, Z.conj())
        out = herm_flatten(M)
    elif G.kind == "orthogonal_tuple":
        blocks = X.reshape(-1, G.k, G.d)
        M = np.einsum("nia,nja->nij", blocks, blocks)
        out = sym_flatten(M)
    else:
        raise ValueError(f"no polynomial invariant row for kind {G.kind!r}")
    return out[0] if single else out


def hpoly_invariant(G: GroupSpec, x) -> np.ndarray:
    """Homogenized polynomial invariant |x| p(x / |x|); 0 at 0."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    nrm = np.linalg.norm(X, axis=1)
    safe = np.where(nrm > 0.0, nrm, 1.0)
    out = poly_invariant(G, X / safe[:, None]) * nrm[:, None]
    out[nrm == 0.0] = 0.0
    return out[0] if single else out


# ---------------------------------------------------------------------------
# the tagged model

MODEL_KINDS = (
    "bank",
    "linear_bank",
    "relu",
    "optimal_planar",
    "optimal_psd",
    "weyl_sort",
    "poly",
    "hpoly",
)


@dataclass
class EmbeddingModel:
    """Tagged union of the embedding architectures.

    kind            payload fields
    bank            bank
    linear_bank     bank, linear
    relu            W, linear, group (metadata; the map is not invariant)
    optimal_planar  r
    optimal_psd     dim
    weyl_sort       weyl_kind, dim
    poly / hpoly    group
    """

    kind: str
    group: GroupSpec | None = None
    bank: FilterBank | None = None
    linear: LinearMap | None = None
    W: np.ndarray | None = None
    r: int = 0
    dim: int = 0
    weyl_kind: str = ""

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.W is not None:
            self.W = np.atleast_2d(np.asarray(self.W, dtype=np.float64))
        if self.group is None and self.bank is not None:
            self.group = self.bank.group

    # -- shapes ------------------------------------------------------------
    @property
    def in_dim(self) -> int:
        if self.kind in ("bank", "linear_bank"):
            return self.bank.group.ambient_dim
        if self.kind == "relu":
            return self.W.shape[1]
        if self.kind == "optimal_planar":
            return 2
        if self.kind in ("optimal_psd", "weyl_sort"):
            return self.dim
        return self.group.ambient_dim

    @property
    def out_dim(self) -> int:
        if self.kind == "bank":
            return self.bank.m
        if self.kind in ("linear_bank", "relu"):
            return self.linear.n_out
        if self.kind == "optimal_planar":
            return 3
        if self.kind == "optimal_psd":
            return self.dim * (self.dim + 1) // 2
        if self.kind == "weyl_sort":
            return self.dim
        if self.kind == "poly" or self.kind == "hpoly":
            return poly_output_dim(self.group)
        raise ValueError(self.kind)

    # -- evaluation --------------------------------------------------------
    def batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.in_dim:
            raise groups.DimensionMismatchError(
                f"model takes R^{self.in_dim}, got width {X.shape[1]}"
            )
        if self.kind == "bank":
            return filters.bank_batch(self.bank, X)
        if self.kind == "linear_bank":
            return filters.lmf_batch(self.linear, self.bank, X)
        if self.kind == "relu":
            return np.maximum(X @ self.W.T, 0.0) @ self.linear.matrix.T
        if self.kind == "optimal_planar":
            return optimal_planar(self.r, X)
        if self.kind == "optimal_psd":
            return optimal_psd(X)
        if self.kind == "weyl_sort":
            return weyl_sort(self.weyl_kind, X)
        if self.kind == "poly":
            return poly_invariant(self.group, X)
        if self.kind == "hpoly":
            return hpoly_invariant(self.group, X)
        raise ValueError(self.kind)

    def __call__(self, x) -> np.ndarray:
        return self.batch(np.atleast_2d(np.asarray(x, float)))[0]

    def describe(self) -> str:
        if self.kind in ("bank", "linear_bank"):
            g = self.bank.group.describe()
        elif self.group is not None:
            g = self.group.describe()
        else:
            g = ""
        return f"{self.kind}[{g}]" if g else self.kind

    # -- serialization -----------------------------------------------------
    def to_json(self) -> str:
        payload: dict = {"kind": self.kind}
        if self.kind in ("bank", "linear_bank"):
            payload["bank"] = json.loads(self.bank.to_json())
        if self.kind in ("linear_bank", "relu"):
            payload["linear"] = self.linear.to_list()
        if self.kind == "relu":
            payload["W"] = [[float(v) for v in row] for row in self.W]
            if self.group is not None:
                payload["group"] = groups.group_to_config(self.group)
        if self.kind == "optimal_planar":
            payload["r"] = self.r
        if self.kind in ("optimal_psd", "weyl_sort"):
            payload["dim"] = self.dim
        if self.kind == "weyl_sort":
            payload["weyl_kind"] = self.weyl_kind
        if self.kind in ("poly", "hpoly"):
            payload["group"] = groups.group_to_config(self.group)
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingModel":
        p = json.loads(text)
        kind = p["kind"]
        if kind == "bank":
            return cls(kind, bank=FilterBank.from_json(json.dumps(p["bank"])))
        if kind == "linear_bank":
            return cls(
                kind,
                bank=FilterBank.from_json(json.dumps(p["bank"])),
                linear=LinearMap(np.array(p["linear"])),
            )
        if kind == "relu":
            grp = groups.group_from_config(p["group"]) if "group" in p else None
            return cls(
                kind,
                W=np.array(p["W"]),
                linear=LinearMap(np.array(p["linear"])),
                group=grp,
            )
        if kind == "optimal_planar":
            return cls(kind, r=int(p["r"]))
        if kind == "optimal_psd":
            return cls(kind, dim=int(p["dim"]))
        if kind == "weyl_sort":
            return cls(kind, dim=int(p["dim"]), weyl_kind=p["weyl_kind"])
        if kind in ("poly", "hpoly"):
            return cls(kind, group=groups.group_from_config(p["group"]))
        raise ValueError(f"unknown model kind {kind!r}")


# convenience constructors ---------------------------------------------------

def bank_model(bank: FilterBank) -> EmbeddingModel:
    return EmbeddingModel("bank", bank=bank)


def linear_bank_model(linear: LinearMap, bank: FilterBank) -> EmbeddingModel:
    if linear.n_in != bank.m:
        raise ValueError(f"linear map takes {linear.n_in} inputs, bank has {bank.m}")
    return EmbeddingModel("linear_bank", bank=bank, linear=linear)


def relu_model(W, linear: LinearMap, group: GroupSpec | None = None) -> EmbeddingModel:
    return EmbeddingModel("relu", W=np.asarray(W, float), linear=linear, group=group)


def optimal_planar_model(r: int) -> EmbeddingModel:
    return EmbeddingModel("optimal_planar", r=int(r))


def optimal_psd_model(d: int) -> EmbeddingModel:
    return EmbeddingModel("optimal_psd", dim=int(d))


def weyl_sort_model(kind: str, d: int) -> EmbeddingModel:
    if kind not in WEYL_KINDS:
        raise ValueError(f"weyl_sort supports {WEYL_KINDS}, got {kind!r}")
    return EmbeddingModel("weyl_sort", weyl_kind=kind, dim=int(d))


def poly_model(G: GroupSpec) -> EmbeddingModel:
    poly_output_dim(G)  # validates the kind
    return EmbeddingModel("poly", group=G)


def hpoly_model(G: GroupSpec) -> EmbeddingModel:
    poly_output_dim(G)
    return EmbeddingModel("hpoly", group=G)
