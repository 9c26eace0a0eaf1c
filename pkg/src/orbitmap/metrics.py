"""Quotient metric on orbit spaces R^d / G.

For orthogonal G the squared quotient distance polarizes through the
alignment oracle,

    d([x], [y])^2 = |x|^2 + |y|^2 - 2 max_g <x, g y>,

which is also how the closed forms below are derived:

    sign_flip              min(|x - y|, |x + y|)
    permutation            |sort(x) - sort(y)|
    hyperoctahedral signs  ||x| - |y||  (componentwise abs)
    phase_circle           sqrt(|x|^2 + |y|^2 - 2 |<x, y>_C|)
    orthogonal_tuple       sqrt(|X|_F^2 + |Y|_F^2 - 2 nuclear(sum_t y_t x_t^T))

``quotient_dist_matrix`` is the all-pairs hot path used by distortion
evaluation and training; it dispatches to the kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups
from .groups import GroupSpec


def quotient_dist(G: GroupSpec, x, y) -> float:
    """Quotient distance min_g |x - g y| between the orbits of x and y."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    align = groups.argmax_inner(G, x, y)
    d2 = float(x @ x) + float(y @ y) - 2.0 * align.value
    return float(np.sqrt(max(d2, 0.0)))


def quotient_dist_enumerated(G: GroupSpec, x, y) -> float:
    """Brute-force min over all elements; oracle for the finite closed forms."""
    x = np.asarray(x, dtype=np.float64)
    best = np.inf
    for g in groups.enumerate_elements(G):
        best = min(best, float(np.linalg.norm(x - groups.apply(G, g, y))))
    return best


def quotient_dist_matrix(G: GroupSpec, X, condensed: bool = True) -> np.ndarray:
    """All-pairs quotient distances of the rows of X.

    Returns the condensed vector in lexicographic pair order
    ((0,1), (0,2), ..., (1,2), ...), or the full symmetric matrix when
    ``condensed=False``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    dvec = groups.quotient_condensed_inner(G, X)
    if condensed:
        return dvec
    n = X.shape[0]
    out = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    out[iu] = dvec
    out[(iu[1], iu[0])] = dvec
    return out


def condensed_index(n: int, i: int, j: int) -> int:
    """Index of pair (i, j), i < j, in the condensed vector for n points."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got ({i}, {j}) with n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def condensed_pair(n: int, idx: int) -> tuple[int, int]:
    """Inverse of ``condensed_index``."""
    if not 0 <= idx < n * (n - 1) // 2:
        raise ValueError("index out of range")
    i = 0
    row = n - 1
    while idx >= row:
        idx -= row
        i += 1
        row -= 1
    return i, i + 1 + idx


@dataclass
class MetricAxiomReport:
    """Worst-case axiom violations over a finite point set."""

    n_points: int
    n_triples: int
    worst_symmetry: float
    worst_triangle: float
    worst_self: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.worst_symmetry <= self.tol
            and self.worst_triangle <= self.tol
            and self.worst_self <= self.tol
        )

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_triples": self.n_triples,
            "worst_symmetry": self.worst_symmetry,
            "worst_triangle": self.worst_triangle,
            "worst_self": self.worst_self,
            "tol": self.tol,
            "ok": self.ok,
        }


def check_metric_axioms(G: GroupSpec, X, tol: float = 1e-9) -> MetricAxiomReport:
    """Verify symmetry, d([x],[x]) = 0 and the triangle inequality on X.

    Symmetry is re-checked through the scalar oracle (not the condensed
    matrix, which is symmetric by construction).  The triangle check
    runs over all ordered triples of the point set.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n = X.shape[0]
    D = quotient_dist_matrix(G, X, condensed=False)

    worst_self = max(quotient_dist(G, x, x) for x in X) if n else 0.0

    worst_sym = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dij = quotient_dist(G, X[i], X[j])
            dji = quotient_dist(G, X[j], X[i])
            worst_sym = max(worst_sym, abs(dij - dji), abs(dij - D[i, j]))

    # d(i,k) <= d(i,j) + d(j,k) for all triples
    viol = D[:, None, :] - D[:, :, None] - D[None, :, :]
    worst_tri = float(np.max(viol)) if n >= 3 else 0.0
    n_triples = n * n * n

    return MetricAxiomReport(
        n_points=n,
        n_triples=n_triples,
        worst_symmetry=float(worst_sym),
        worst_triangle=max(worst_tri, 0.0),
        worst_self=float(worst_self),
        tol=tol,
    )
