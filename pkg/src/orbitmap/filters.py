"""Max filter banks.

The max filter of a template y against a point x is the polarized
alignment <<[x],[y]>> = max_g <x, g y>.  A bank stacks m templates into
a G-invariant map Phi: R^d -> R^m, and a linear map L composed with the
bank gives the trainable invariant architectures.

Subgradient facts used throughout (valid wherever the maximizer is
unique, and a valid subgradient everywhere):

    d/dx max_g <x, g y> = g* y          (the aligned template)
    d/dy max_g <x, g y> = g*^{-1} x     (the aligned input)

where g* attains the max.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import groups
from .groups import GroupSpec


def max_filter(G: GroupSpec, y, x) -> float:
    """<<[x],[y]>> = max_g <x, g y>."""
    return groups.argmax_inner(G, np.asarray(x, float), np.asarray(y, float)).value


@dataclass
class FilterBank:
    """m templates over a common group; rows of ``templates`` are the y_i."""

    group: GroupSpec
    templates: np.ndarray

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.templates, dtype=np.float64))
        if T.shape[1] != self.group.ambient_dim:
            raise groups.DimensionMismatchError(
                f"templates of width {T.shape[1]} for {self.group.describe()}"
            )
        self.templates = T

    @property
    def m(self) -> int:
        return self.templates.shape[0]

    def to_json(self) -> str:
        payload = {
            "group": groups.group_to_config(self.group),
            "templates": [[float(v) for v in row] for row in self.templates],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "FilterBank":
        payload = json.loads(text)
        return cls(
            group=groups.group_from_config(payload["group"]),
            templates=np.array(payload["templates"], dtype=np.float64),
        )


def bank_apply(bank: FilterBank, x) -> np.ndarray:
    """Phi(x) in R^m for a single point."""
    return bank_batch(bank, np.atleast_2d(np.asarray(x, float)))[0]


def bank_batch(bank: FilterBank, X) -> np.ndarray:
    """(N, m) bank values for row-stacked inputs; the hot forward pass."""
    return groups.batch_inner_max(bank.group, X, bank.templates)


def bank_subgradient(bank: FilterBank, x) -> np.ndarray:
    """(m, d) input-side subgradient: row i is g*_i y_i."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(bank.templates)
    for i, y in enumerate(bank.templates):
        out[i] = groups.argmax_inner(bank.group, x, y).aligned
    return out


def bank_aligned_inputs(bank: FilterBank, x) -> np.ndarray:
    """(m, d) template-side subgradient: row i is g*_i^{-1} x.

    Closed-form fast paths cover the kinds that appear with wide banks;
    the rest fall back to the scalar oracle per template.
    """
    x = np.asarray(x, dtype=np.float64)
    G, T = bank.group, bank.templates
    if G.kind == "sign_flip":
        s = np.where(T @ x >= 0.0, 1.0, -1.0)
        return s[:, None] * x[None, :]
    if G.kind == "hyperoctahedral_signs":
        s = np.where(x[None, :] * T >= 0.0, 1.0, -1.0)
        return s * x[None, :]
    if G.kind == "permutation":
        order_x = np.argsort(-x, kind="stable")
        order_T = np.argsort(-T, axis=1, kind="stable")
        out = np.empty_like(T)
        rows = np.arange(T.shape[0])[:, None]
        out[rows, order_T] = x[order_x][None, :]
        return out
    if G.kind == "phase_circle":
        zx = groups.to_complex(x)
        zT = groups.to_complex(T)
        z = zT @ zx.conj()  # z_i = sum_j conj(x_j) t_ij
        mag = np.abs(z)
        rot = np.where(mag > 0.0, z / np.where(mag > 0, mag, 1.0), 1.0)
        return groups.from_complex(rot[:, None] * zx[None, :])
    out = np.empty_like(T)
    for i, y in enumerate(T):
        align = groups.argmax_inner(G, x, y)
        out[i] = groups.apply_inverse(G, align.element, x)
    return out


def bank_subgradient_batch(bank: FilterBank, X) -> np.ndarray:
    """(N, m, d) input-side subgradients, vectorized over points.

    Row (i, j) is g* t_j for the aligner of x_i against template t_j.
    Finite kinds gather from the template orbit stack; phase groups use
    the closed-form phase; the remaining continuous kinds loop.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    G, T = bank.group, bank.templates
    n, m = X.shape[0], T.shape[0]
    if G.is_finite:
        orbit = groups.orbit_stack(G, T)  # (m, n_g, d)
        vals = X @ orbit.reshape(-1, G.ambient_dim).T
        idx = vals.reshape(n, m, -1).argmax(axis=2)
        return orbit[np.arange(m)[None, :], idx]
    if G.kind == "phase_circle":
        zX = groups.to_complex(X)
        zT = groups.to_complex(T)
        z = zX.conj() @ zT.T  # (n, m), z = <x_i, t_j>_C
        mag = np.abs(z)
        rot = np.where(mag > 0.0, z / np.where(mag > 0, mag, 1.0), 1.0)
        return groups.from_complex(rot.conj()[:, :, None] * zT[None, :, :])
    out = np.empty((n, m, G.ambient_dim))
    for i, x in enumerate(X):
        out[i] = bank_subgradient(bank, x)
    return out


def bank_tie_gaps(bank: FilterBank, X) -> np.ndarray:
    """(N,) smallest best-to-second alignment gap across the bank.

    Only meaningful for finite groups; points with a small gap sit near
    the nondifferentiable locus of some filter.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    G, T = bank.group, bank.templates
    orbit = groups.orbit_stack(G, T)
    n_g = orbit.shape[1]
    if n_g < 2:
        return np.full(X.shape[0], np.inf)
    vals = (X @ orbit.reshape(-1, G.ambient_dim).T).reshape(X.shape[0], -1, n_g)
    part = np.partition(vals, n_g - 2, axis=2)
    gaps = part[:, :, -1] - part[:, :, -2]
    return gaps.min(axis=1)


def bank_tie_gap(bank: FilterBank, x) -> float:
    """Smallest gap between the best and second-best aligner over the bank.

    Used to detect points of nondifferentiability: a gap below a small
    threshold means some filter has two near-attaining group elements.
    Only defined for finite groups (continuous maximizers are compared
    along their orbit samples by the caller instead).
    """
    x = np.asarray(x, dtype=np.float64)
    gap = np.inf
    for y in bank.templates:
        orbit = groups.orbit_stack(bank.group, y[None, :])[0]
        vals = np.sort(orbit @ x)
        if vals.size >= 2:
            gap = min(gap, float(vals[-1] - vals[-2]))
    return gap


@dataclass
class LinearMap:
    """Dense linear layer applied after a bank (rows = output coords)."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=np.float64))

    @property
    def n_out(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_in(self) -> int:
        return self.matrix.shape[1]

    def to_list(self):
        return [[float(v) for v in row] for row in self.matrix]


def lmf_apply(L: LinearMap, bank: FilterBank, x) -> np.ndarray:
    """(L o Phi)(x)."""
    if L.n_in != bank.m:
        raise ValueError(f"linear map takes {L.n_in} inputs, bank has {bank.m}")
    return L.matrix @ bank_apply(bank, x)


def lmf_batch(L: LinearMap, bank: FilterBank, X) -> np.ndarray:
    if L.n_in != bank.m:
        raise ValueError(f"linear map takes {L.n_in} inputs, bank has {bank.m}")
    return bank_batch(bank, X) @ L.matrix.T


def sort_bank(d: int) -> FilterBank:
    """Bank of cumulative-ones templates under S_d.

    Template i is e_1 + ... + e_{i+1}, so filter i returns the sum of
    the i+1 largest coordinates of the input.
    """
    return FilterBank(groups.permutation(d), np.tril(np.ones((d, d))))


def sort_recovery(d: int) -> LinearMap:
    """Bidiagonal inverse of the cumulative-ones bank.

    Composing with ``sort_bank(d)`` recovers the decreasing sort:
    L Phi(x) = sort(x).  The map differences consecutive partial sums.
    """
    L = np.eye(d)
    idx = np.arange(1, d)
    L[idx, idx - 1] = -1.0
    return LinearMap(L)
