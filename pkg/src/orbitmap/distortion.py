"""Empirical bilipschitz constants and distortion of an embedding.

Over a finite point set X the empirical constants of f are

    alpha = min over pairs of |f(x) - f(y)| / d([x], [y])
    beta  = max over pairs of |f(x) - f(y)| / d([x], [y])
    dist  = beta / alpha

with pairs whose quotient distance is below a drop tolerance excluded
(points of one orbit carry no Lipschitz information and would divide by
zero).  Pairs are scanned in lexicographic order so arg pairs are the
smallest-index attaining pair, independent of backend.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import metrics
from .groups import GroupSpec

DROP_TOL = 1e-9


@dataclass
class DistortionReport:
    """Empirical bilipschitz summary of one model over one point set."""

    alpha: float
    beta: float
    dist: float
    argmin_pair: tuple[int, int]
    argmax_pair: tuple[int, int]
    n_points: int
    n_pairs: int
    n_dropped: int
    group: str = ""
    model: str = ""
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "model": self.model,
            "n": self.n_points,
            "alpha": self.alpha,
            "beta": self.beta,
            "dist": self.dist,
            "argmin_pair": list(self.argmin_pair),
            "argmax_pair": list(self.argmax_pair),
            "n_pairs": self.n_pairs,
            "n_dropped": self.n_dropped,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    CSV_HEADER = "group,model,n,alpha,beta,dist,seed"

    def csv_row(self) -> str:
        seed = "" if self.seed is None else str(self.seed)
        return (
            f"{self.group},{self.model},{self.n_points},"
            f"{self.alpha!r},{self.beta!r},{self.dist!r},{seed}"
        )


def pair_ratios(
    embedded: np.ndarray, quot: np.ndarray, drop_tol: float = DROP_TOL
):
    """Embedded over quotient distance per pair; boolean mask of kept pairs."""
    from . import _kernels

    edist = _kernels.euclidean_condensed(embedded)
    mask = quot > drop_tol
    ratios = np.full(quot.shape, np.nan)
    ratios[mask] = edist[mask] / quot[mask]
    return ratios, mask


def empirical_distortion(
    model,
    G: GroupSpec,
    X,
    drop_tol: float = DROP_TOL,
    seed: int | None = None,
) -> DistortionReport:
    """Evaluate a model's empirical distortion over all pairs of X.

    ``model`` is anything with a ``batch`` method (an EmbeddingModel).
    Raises ValueError when fewer than two distinct orbits remain after
    dropping coincident pairs.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    F = np.asarray(model.batch(X), dtype=np.float64)
    quot = metrics.quotient_dist_matrix(G, X)
    ratios, mask = pair_ratios(F, quot, drop_tol)
    kept = int(mask.sum())
    if kept == 0:
        raise ValueError("all pairs coincide in the quotient; nothing to measure")

    filled_min = np.where(mask, ratios, np.inf)
    filled_max = np.where(mask, ratios, -np.inf)
    imin = int(np.argmin(filled_min))
    imax = int(np.argmax(filled_max))
    alpha = float(ratios[imin])
    beta = float(ratios[imax])
    dist = beta / alpha if alpha > 0.0 else float("inf")

    return DistortionReport(
        alpha=alpha,
        beta=beta,
        dist=float(dist),
        argmin_pair=metrics.condensed_pair(n, imin),
        argmax_pair=metrics.condensed_pair(n, imax),
        n_points=n,
        n_pairs=kept,
        n_dropped=int(quot.size - kept),
        group=G.describe(),
        model=getattr(model, "describe", lambda: type(model).__name__)(),
        seed=seed,
    )


@dataclass
class WeylReport:
    """Stability check: perturbing a map moves alpha and beta by at most
    the Lipschitz norm of the difference.

    Over a common pair set, |alpha(f) - alpha(g)| <= beta(f - g) and
    |beta(f) - beta(g)| <= beta(f - g).  Margins are the slack
    beta(f - g) - |delta|; both must be >= 0 up to rounding.
    """

    alpha_f: float
    beta_f: float
    alpha_g: float
    beta_g: float
    beta_diff: float
    margin_alpha: float
    margin_beta: float

    @property
    def margin(self) -> float:
        return min(self.margin_alpha, self.margin_beta)

    def ok(self, tol: float = 1e-10) -> bool:
        return self.margin >= -tol

    def to_dict(self) -> dict:
        return {
            "alpha_f": self.alpha_f,
            "beta_f": self.beta_f,
            "alpha_g": self.alpha_g,
            "beta_g": self.beta_g,
            "beta_diff": self.beta_diff,
            "margin_alpha": self.margin_alpha,
            "margin_beta": self.margin_beta,
        }


def weyl_check(
    model_f, model_g, G: GroupSpec, X, drop_tol: float = DROP_TOL
) -> WeylReport:
    """Empirical perturbation bound for two maps over the same pair set."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Ff = np.asarray(model_f.batch(X), dtype=np.float64)
    Fg = np.asarray(model_g.batch(X), dtype=np.float64)
    if Ff.shape != Fg.shape:
        raise ValueError("models must share an output dimension")
    quot = metrics.quotient_dist_matrix(G, X)
    mask = quot > drop_tol
    if not mask.any():
        raise ValueError("all pairs coincide in the quotient")

    def constants(F):
        r, _ = pair_ratios(F, quot, drop_tol)
        return float(np.nanmin(r)), float(np.nanmax(r))

    alpha_f, beta_f = constants(Ff)
    alpha_g, beta_g = constants(Fg)
    _, beta_diff = constants(Ff - Fg)
    return WeylReport(
        alpha_f=alpha_f,
        beta_f=beta_f,
        alpha_g=alpha_g,
        beta_g=beta_g,
        beta_diff=beta_diff,
        margin_alpha=beta_diff - abs(alpha_f - alpha_g),
        margin_beta=beta_diff - abs(beta_f - beta_g),
    )
