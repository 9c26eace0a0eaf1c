"""Orthogonal group actions and the alignment oracle.

A ``GroupSpec`` names a subgroup G of the orthogonal group of an ambient
space R^dim together with its action.  Everything downstream (quotient
metrics, max filters, subgradients) reduces to one oracle per group:

    argmax_inner(G, x, y)  ->  (max_g <x, g y>,  the maximizer g y,  g)

For finite groups the oracle enumerates or uses a closed form that
agrees with enumeration; for the continuous kinds (global phase,
diagonal O(d), planar shapes) the maximizer is found in closed form
through polar decomposition.

Supported kinds and their base data:

    sign_flip(d)              {+I, -I} on R^d
    planar_rotation(r)        cyclic rotations by 2 pi / r on R^2
    permutation(d)            S_d permuting coordinates of R^d
    cyclic_shift(d)           circular coordinate shifts of R^d
    hyperoctahedral_signs(d)  per-coordinate sign flips (+-1)^d on R^d
    phase_circle(d)           global phase S^1 on C^d = R^{2d}
    orthogonal_tuple(d, k)    O(d) acting diagonally on k-tuples, R^{dk}
    shape_group(k)            O(2) x C_k on k planar vertices, R^{2k}
    explicit_finite(mats)     a finite list of orthogonal matrices

Complex coordinates are stored interleaved: (re_0, im_0, re_1, im_1, ...).
Tuples and shapes are stored as concatenated blocks, row-major.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels

FINITE_KINDS = (
    "sign_flip",
    "planar_rotation",
    "permutation",
    "cyclic_shift",
    "hyperoctahedral_signs",
    "explicit_finite",
)
CONTINUOUS_KINDS = ("phase_circle", "orthogonal_tuple", "shape_group")
KINDS = FINITE_KINDS + CONTINUOUS_KINDS

# enumeration caps; beyond these the element list is refused rather than built
MAX_PERMUTATION_ENUM = 8
MAX_HYPEROCTA_ENUM = 16

ORTHOGONALITY_TOL = 1e-10


class ContinuousGroupError(ValueError):
    """Raised when a finite enumeration is requested of a continuous group."""


class DimensionMismatchError(ValueError):
    """Raised when a vector does not live in the group's ambient space."""


class MaxAlignment(NamedTuple):
    """Result of the alignment oracle: value, maximizer g*y, element g*."""

    value: float
    aligned: np.ndarray
    element: object


@dataclass(frozen=True)
class GroupSpec:
    """Immutable description of a group action on R^ambient_dim.

    Use the module-level constructors (``sign_flip``, ``permutation``,
    ...) rather than building instances directly; they fill the fields
    consistently and validate parameters.
    """

    kind: str
    ambient_dim: int
    d: int = 0
    k: int = 0
    r: int = 0
    matrices: tuple = field(default=(), repr=False)

    @property
    def is_finite(self) -> bool:
        return self.kind in FINITE_KINDS

    @cached_property
    def matrix_stack(self) -> np.ndarray:
        """(n_g, dim, dim) array of the explicit_finite matrices."""
        if self.kind != "explicit_finite":
            raise ValueError("matrix_stack is only defined for explicit_finite")
        return np.array(self.matrices, dtype=np.float64)

    def order(self) -> int | None:
        """Number of elements, or None for continuous kinds."""
        if self.kind == "sign_flip":
            return 2
        if self.kind == "planar_rotation":
            return self.r
        if self.kind == "permutation":
            import math

            return math.factorial(self.d)
        if self.kind == "cyclic_shift":
            return self.d
        if self.kind == "hyperoctahedral_signs":
            return 2**self.d
        if self.kind == "explicit_finite":
            return len(self.matrices)
        return None

    def describe(self) -> str:
        if self.kind == "sign_flip":
            return f"sign_flip({self.d})"
        if self.kind == "planar_rotation":
            return f"planar_rotation({self.r})"
        if self.kind == "permutation":
            return f"permutation({self.d})"
        if self.kind == "cyclic_shift":
            return f"cyclic_shift({self.d})"
        if self.kind == "hyperoctahedral_signs":
            return f"hyperoctahedral_signs({self.d})"
        if self.kind == "phase_circle":
            return f"phase_circle({self.d})"
        if self.kind == "orthogonal_tuple":
            return f"orthogonal_tuple({self.d},{self.k})"
        if self.kind == "shape_group":
            return f"shape_group({self.k})"
        return f"explicit_finite[{len(self.matrices)}]"


def sign_flip(d: int) -> GroupSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    return GroupSpec("sign_flip", ambient_dim=d, d=d)


def planar_rotation(r: int) -> GroupSpec:
    if r < 1:
        raise ValueError("r must be >= 1")
    return GroupSpec("planar_rotation", ambient_dim=2, r=r)


def permutation(d: int) -> GroupSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    return GroupSpec("permutation", ambient_dim=d, d=d)


def cyclic_shift(d: int) -> GroupSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    return GroupSpec("cyclic_shift", ambient_dim=d, d=d)


def hyperoctahedral_signs(d: int) -> GroupSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    return GroupSpec("hyperoctahedral_signs", ambient_dim=d, d=d)


def phase_circle(d: int) -> GroupSpec:
    if d < 1:
        raise ValueError("d must be >= 1")
    return GroupSpec("phase_circle", ambient_dim=2 * d, d=d)


def orthogonal_tuple(d: int, k: int) -> GroupSpec:
    if d < 1 or k < 1:
        raise ValueError("d and k must be >= 1")
    return GroupSpec("orthogonal_tuple", ambient_dim=d * k, d=d, k=k)


def shape_group(k: int) -> GroupSpec:
    if k < 3:
        raise ValueError("a shape needs at least 3 vertices")
    return GroupSpec("shape_group", ambient_dim=2 * k, d=2, k=k)


def explicit_finite(matrices) -> GroupSpec:
    """Finite group from an explicit list of orthogonal matrices.

    The list must contain the identity and be closed under inversion
    (transposition); both are checked at construction.
    """
    mats = [np.asarray(M, dtype=np.float64) for M in matrices]
    if not mats:
        raise ValueError("empty matrix list")
    dim = mats[0].shape[0]
    for M in mats:
        if M.shape != (dim, dim):
            raise DimensionMismatchError("matrices must share a square shape")
        if np.max(np.abs(M.T @ M - np.eye(dim))) > ORTHOGONALITY_TOL:
            raise ValueError("matrix is not orthogonal")
    stack = np.array(mats)
    if not any(np.max(np.abs(M - np.eye(dim))) <= ORTHOGONALITY_TOL for M in mats):
        raise ValueError("identity element missing")
    for M in mats:
        diffs = np.max(np.abs(stack - M.T[None, :, :]), axis=(1, 2))
        if diffs.min() > ORTHOGONALITY_TOL:
            raise ValueError("matrix list is not closed under inversion")
    frozen = tuple(tuple(tuple(float(v) for v in row) for row in M) for M in mats)
    return GroupSpec("explicit_finite", ambient_dim=dim, matrices=frozen)


def _check_vec(G: GroupSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (G.ambient_dim,):
        raise DimensionMismatchError(
            f"{G.describe()} acts on R^{G.ambient_dim}, got shape {x.shape}"
        )
    return x


def to_complex(x: np.ndarray) -> np.ndarray:
    """Interleaved real coordinates -> complex vector."""
    x = np.asarray(x, dtype=np.float64)
    return x[..., 0::2] + 1j * x[..., 1::2]


def from_complex(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def _rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def identity_element(G: GroupSpec):
    if G.kind == "sign_flip":
        return 1
    if G.kind == "planar_rotation":
        return 0
    if G.kind == "permutation":
        return np.arange(G.d)
    if G.kind == "cyclic_shift":
        return 0
    if G.kind == "hyperoctahedral_signs":
        return np.ones(G.d)
    if G.kind == "explicit_finite":
        stack = G.matrix_stack
        diffs = np.max(np.abs(stack - np.eye(G.ambient_dim)[None]), axis=(1, 2))
        return int(np.argmin(diffs))
    if G.kind == "phase_circle":
        return 0.0
    if G.kind == "orthogonal_tuple":
        return np.eye(G.d)
    if G.kind == "shape_group":
        return (np.eye(2), 0)
    raise ValueError(G.kind)


def apply(G: GroupSpec, g, x) -> np.ndarray:
    """Apply the group element g to x."""
    x = _check_vec(G, x)
    if G.kind == "sign_flip":
        return g * x
    if G.kind == "planar_rotation":
        return _rotation_matrix(2.0 * np.pi * g / G.r) @ x
    if G.kind == "permutation":
        return x[np.asarray(g)]
    if G.kind == "cyclic_shift":
        return np.roll(x, g)
    if G.kind == "hyperoctahedral_signs":
        return np.asarray(g) * x
    if G.kind == "explicit_finite":
        return G.matrix_stack[g] @ x
    if G.kind == "phase_circle":
        return from_complex(np.exp(1j * g) * to_complex(x))
    if G.kind == "orthogonal_tuple":
        blocks = x.reshape(G.k, G.d)
        return (blocks @ np.asarray(g).T).reshape(-1)
    if G.kind == "shape_group":
        Q, s = g
        rows = np.roll(x.reshape(G.k, 2), s, axis=0)
        return (rows @ np.asarray(Q).T).reshape(-1)
    raise ValueError(G.kind)


def apply_inverse(G: GroupSpec, g, x) -> np.ndarray:
    """Apply g^{-1} to x.  All actions are orthogonal so g^{-1} = g^T."""
    x = _check_vec(G, x)
    if G.kind == "sign_flip":
        return g * x
    if G.kind == "planar_rotation":
        return _rotation_matrix(-2.0 * np.pi * g / G.r) @ x
    if G.kind == "permutation":
        out = np.empty_like(x)
        out[np.asarray(g)] = x
        return out
    if G.kind == "cyclic_shift":
        return np.roll(x, -g)
    if G.kind == "hyperoctahedral_signs":
        return np.asarray(g) * x
    if G.kind == "explicit_finite":
        return G.matrix_stack[g].T @ x
    if G.kind == "phase_circle":
        return from_complex(np.exp(-1j * g) * to_complex(x))
    if G.kind == "orthogonal_tuple":
        blocks = x.reshape(G.k, G.d)
        return (blocks @ np.asarray(g)).reshape(-1)
    if G.kind == "shape_group":
        Q, s = g
        rows = np.roll(x.reshape(G.k, 2), -s, axis=0) @ np.asarray(Q)
        return rows.reshape(-1)
    raise ValueError(G.kind)


def enumerate_elements(G: GroupSpec) -> list:
    """All elements of a finite group, in the canonical deterministic order.

    The order here is the tie-breaking order of the alignment oracle.
    Raises ContinuousGroupError for continuous kinds and ValueError when
    the order exceeds the enumeration caps.
    """
    if G.kind == "sign_flip":
        return [1, -1]
    if G.kind == "planar_rotation":
        return list(range(G.r))
    if G.kind == "permutation":
        if G.d > MAX_PERMUTATION_ENUM:
            raise ValueError(f"refusing to enumerate S_{G.d}")
        return [np.array(p) for p in itertools.permutations(range(G.d))]
    if G.kind == "cyclic_shift":
        return list(range(G.d))
    if G.kind == "hyperoctahedral_signs":
        if G.d > MAX_HYPEROCTA_ENUM:
            raise ValueError(f"refusing to enumerate 2^{G.d} sign patterns")
        out = []
        for i in range(2**G.d):
            signs = np.ones(G.d)
            for j in range(G.d):
                if (i >> j) & 1:
                    signs[j] = -1.0
            out.append(signs)
        return out
    if G.kind == "explicit_finite":
        return list(range(len(G.matrices)))
    raise ContinuousGroupError(f"{G.describe()} is not finite")


def sample_elements(G: GroupSpec, n: int, rng) -> list:
    """Draw n elements, uniformly (Haar for the continuous kinds)."""
    rng = np.random.default_rng(rng)
    if G.kind in FINITE_KINDS:
        if G.kind == "permutation":
            return [rng.permutation(G.d) for _ in range(n)]
        if G.kind == "hyperoctahedral_signs":
            return [rng.choice([-1.0, 1.0], size=G.d) for _ in range(n)]
        elems = enumerate_elements(G)
        idx = rng.integers(0, len(elems), size=n)
        return [elems[i] for i in idx]
    if G.kind == "phase_circle":
        return list(rng.uniform(0.0, 2.0 * np.pi, size=n))
    if G.kind == "orthogonal_tuple":
        return [_haar_orthogonal(G.d, rng) for _ in range(n)]
    if G.kind == "shape_group":
        return [
            (_haar_orthogonal(2, rng), int(rng.integers(0, G.k))) for _ in range(n)
        ]
    raise ValueError(G.kind)


def _haar_orthogonal(d: int, rng) -> np.ndarray:
    A = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def _svd_align(M: np.ndarray):
    # maximize tr(R M) over R in O(d): value = nuclear norm, R* = V U^T
    U, s, Vt = np.linalg.svd(M)
    return float(s.sum()), Vt.T @ U.T


def argmax_inner(G: GroupSpec, x, y) -> MaxAlignment:
    """max_g <x, g y> with the attaining g y and g.

    Ties between finite elements resolve to the first maximizer in the
    ``enumerate_elements`` order (the permutation closed form uses
    stable sorting, which is deterministic but may pick a different
    maximizer of equal value).
    """
    x = _check_vec(G, x)
    y = _check_vec(G, y)

    if G.kind == "sign_flip":
        v = float(x @ y)
        if v >= 0.0:
            return MaxAlignment(v, y.copy(), 1)
        return MaxAlignment(-v, -y, -1)

    if G.kind == "planar_rotation":
        zx = complex(x[0], x[1])
        zy = complex(y[0], y[1])
        base = zx.conjugate() * zy
        angles = 2.0 * np.pi * np.arange(G.r) / G.r
        vals = (np.exp(1j * angles) * base).real
        j = int(np.argmax(vals))
        return MaxAlignment(float(vals[j]), apply(G, j, y), j)

    if G.kind == "permutation":
        order_x = np.argsort(-x, kind="stable")
        order_y = np.argsort(-y, kind="stable")
        value = float(x[order_x] @ y[order_y])
        sigma = np.empty(G.d, dtype=np.intp)
        sigma[order_x] = order_y
        return MaxAlignment(value, y[sigma], sigma)

    if G.kind == "cyclic_shift":
        vals = np.array([x @ np.roll(y, s) for s in range(G.d)])
        s = int(np.argmax(vals))
        return MaxAlignment(float(vals[s]), np.roll(y, s), s)

    if G.kind == "hyperoctahedral_signs":
        prod = x * y
        signs = np.where(prod >= 0.0, 1.0, -1.0)
        return MaxAlignment(float(np.abs(prod).sum()), signs * y, signs)

    if G.kind == "explicit_finite":
        vals = G.matrix_stack @ y @ x
        g = int(np.argmax(vals))
        return MaxAlignment(float(vals[g]), G.matrix_stack[g] @ y, g)

    if G.kind == "phase_circle":
        zx = to_complex(x)
        zy = to_complex(y)
        z = np.vdot(zx, zy)  # sum conj(x_j) y_j
        value = float(np.abs(z))
        phi = 0.0 if value == 0.0 else float(-np.angle(z))
        return MaxAlignment(value, apply(G, phi, y), phi)

    if G.kind == "orthogonal_tuple":
        Xb = x.reshape(G.k, G.d)
        Yb = y.reshape(G.k, G.d)
        M = Yb.T @ Xb  # sum_t y_t x_t^T
        value, R = _svd_align(M)
        return MaxAlignment(value, (Yb @ R.T).reshape(-1), R)

    if G.kind == "shape_group":
        Xb = x.reshape(G.k, 2)
        Yb = y.reshape(G.k, 2)
        best_val, best_s, best_M = -np.inf, 0, None
        for s in range(G.k):
            M = np.roll(Yb, s, axis=0).T @ Xb
            fro2 = float(np.sum(M * M))
            det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
            nuc = np.sqrt(max(fro2 + 2.0 * abs(det), 0.0))
            if nuc > best_val:
                best_val, best_s, best_M = nuc, s, M
        _, R = _svd_align(best_M)
        g = (R, best_s)
        return MaxAlignment(float(best_val), apply(G, g, y), g)

    raise ValueError(G.kind)


def orbit_stack(G: GroupSpec, Y: np.ndarray) -> np.ndarray:
    """(m, |G|, dim) array of g . Y[i] over the canonical element order.

    Only defined for finite kinds; used to hand template orbits to the
    batch kernels.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    elems = enumerate_elements(G)
    out = np.empty((Y.shape[0], len(elems), G.ambient_dim))
    for i, y in enumerate(Y):
        for j, g in enumerate(elems):
            out[i, j] = apply(G, g, y)
    return out


# ---------------------------------------------------------------------------
# batch alignment values: max_g <x_i, g t_j> for all rows x_i, templates t_j

def batch_inner_max(G: GroupSpec, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """(N, m) matrix of max_g <x_i, g t_j>; the filter-bank forward pass."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    T = np.atleast_2d(np.asarray(T, dtype=np.float64))
    if X.shape[1] != G.ambient_dim or T.shape[1] != G.ambient_dim:
        raise DimensionMismatchError(
            f"{G.describe()} acts on R^{G.ambient_dim}, got {X.shape} / {T.shape}"
        )
    if G.kind == "sign_flip":
        return np.abs(X @ T.T)
    if G.kind == "permutation":
        Xs = -np.sort(-X, axis=1)
        Ts = -np.sort(-T, axis=1)
        return Xs @ Ts.T
    if G.kind == "hyperoctahedral_signs":
        return np.abs(X) @ np.abs(T).T
    if G.kind in ("planar_rotation", "cyclic_shift", "explicit_finite"):
        return _kernels.orbit_bank_values(X, orbit_stack(G, T))
    if G.kind == "phase_circle":
        return _kernels.phase_bank_values(to_complex(X), to_complex(T))
    if G.kind == "orthogonal_tuple":
        return _kernels.tuple_bank_values(
            X.reshape(-1, G.k, G.d), T.reshape(-1, G.k, G.d)
        )
    if G.kind == "shape_group":
        return _kernels.shape_bank_values(
            X.reshape(-1, G.k, 2), T.reshape(-1, G.k, 2)
        )
    raise ValueError(G.kind)


def quotient_condensed_inner(G: GroupSpec, X: np.ndarray) -> np.ndarray:
    """Condensed all-pairs quotient distances (lexicographic pair order)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != G.ambient_dim:
        raise DimensionMismatchError(
            f"{G.describe()} acts on R^{G.ambient_dim}, got {X.shape}"
        )
    if G.kind == "sign_flip":
        return _kernels.signflip_condensed(X)
    if G.kind == "permutation":
        return _kernels.euclidean_condensed(-np.sort(-X, axis=1))
    if G.kind == "hyperoctahedral_signs":
        return _kernels.hyperocta_condensed(X)
    if G.kind in ("planar_rotation", "cyclic_shift", "explicit_finite"):
        orbits = orbit_stack(G, X)
        return _kernels.min_over_orbits_condensed(X, orbits)
    if G.kind == "phase_circle":
        return _kernels.phase_condensed(to_complex(X))
    if G.kind == "orthogonal_tuple":
        return _kernels.tuple_condensed(X.reshape(-1, G.k, G.d))
    if G.kind == "shape_group":
        return _kernels.shape_condensed(X.reshape(-1, G.k, 2))
    raise ValueError(G.kind)


def group_to_config(G: GroupSpec) -> dict:
    """Key-value form used by config files and serialized banks."""
    cfg = {"kind": G.kind}
    if G.kind in ("sign_flip", "permutation", "cyclic_shift", "hyperoctahedral_signs"):
        cfg["d"] = G.d
    elif G.kind == "planar_rotation":
        cfg["r"] = G.r
    elif G.kind == "phase_circle":
        cfg["d"] = G.d
    elif G.kind == "orthogonal_tuple":
        cfg["d"] = G.d
        cfg["k"] = G.k
    elif G.kind == "shape_group":
        cfg["k"] = G.k
    elif G.kind == "explicit_finite":
        cfg["matrices"] = [[list(row) for row in M] for M in G.matrices]
    return cfg


def group_from_config(cfg: dict) -> GroupSpec:
    kind = cfg.get("kind")
    if kind == "sign_flip":
        return sign_flip(int(cfg["d"]))
    if kind == "planar_rotation":
        return planar_rotation(int(cfg["r"]))
    if kind == "permutation":
        return permutation(int(cfg["d"]))
    if kind == "cyclic_shift":
        return cyclic_shift(int(cfg["d"]))
    if kind == "hyperoctahedral_signs":
        return hyperoctahedral_signs(int(cfg["d"]))
    if kind == "phase_circle":
        return phase_circle(int(cfg["d"]))
    if kind == "orthogonal_tuple":
        return orthogonal_tuple(int(cfg["d"]), int(cfg["k"]))
    if kind == "shape_group":
        return shape_group(int(cfg["k"]))
    if kind == "explicit_finite":
        return explicit_finite(cfg["matrices"])
    raise ValueError(f"unknown group kind {kind!r}")
