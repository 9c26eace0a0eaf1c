"""Distortion-driven training of invariant embedding architectures.

Architectures (config ``arch``):

    mf     max filter bank alone; unit-norm templates, re-projected
           to the sphere after every step
    lrmf   frozen Gaussian bank, linear readout trained
    lmf    bank and linear readout trained jointly
    relu   L o relu o W trained on orbit-augmented data (the map is
           not invariant; augmentation supplies the symmetry)

The loss on a pair set is log beta - log alpha with

    ratio(a, b) = |f(x_a) - f(x_b)| / d([x_a], [x_b]),

quotient distances precomputed once per run.  Subgradients flow only
through the attaining max and min pairs, and through the aligned group
elements inside each max filter:

    d Phi_i(x) / d y_i = g*^{-1} x   (the aligned input).

Optimization is Adam with documented defaults (lr 1e-2, 2000 steps,
10 restarts); restarts run on independent named RNG streams and the
best-by-training-distortion parameters are kept, so results are
deterministic for a fixed config and seed, and the warm-started loss
never ends above its starting value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from . import _kernels
from . import config as cfg_mod
from . import distortion, embeddings, filters, groups, metrics
from .config import ExperimentConfig
from .embeddings import EmbeddingModel
from .filters import FilterBank, LinearMap
from .groups import GroupSpec

_EPS = 1e-30


class _Adam:
    """Minimal Adam on a list of arrays."""

    def __init__(self, params, lr):
        self.lr = lr
        self.b1, self.b2, self.eps = 0.9, 0.999, 1e-8
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        b1t = 1.0 - self.b1**self.t
        b2t = 1.0 - self.b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


@dataclass
class TrainResult:
    model: EmbeddingModel
    train_dist: float
    restart_dists: list
    arch: str

    def to_dict(self) -> dict:
        return {
            "arch": self.arch,
            "train_dist": self.train_dist,
            "restart_dists": self.restart_dists,
        }


def _init_params(cfg: ExperimentConfig, rng, init=None) -> dict:
    d = cfg.group.ambient_dim
    if init is not None:
        return {k: np.array(v, dtype=np.float64) for k, v in init.items()}
    params = {}
    if cfg.arch in ("mf", "lrmf", "lmf"):
        T = rng.standard_normal((cfg.m, d))
        if cfg.arch == "mf":
            T /= np.linalg.norm(T, axis=1, keepdims=True)
        params["templates"] = T
    if cfg.arch in ("lrmf", "lmf"):
        params["L"] = rng.standard_normal((cfg.n, cfg.m)) / np.sqrt(cfg.m)
    if cfg.arch == "relu":
        params["W"] = rng.standard_normal((cfg.m, d)) / np.sqrt(d)
        params["L"] = rng.standard_normal((cfg.n, cfg.m)) / np.sqrt(cfg.m)
    return params


def _trainable(cfg: ExperimentConfig) -> tuple:
    if cfg.arch == "mf":
        return ("templates",)
    if cfg.arch == "lrmf":
        return ("L",)
    if cfg.arch == "lmf":
        return ("templates", "L")
    return ("W", "L")


def _augmented_points(cfg: ExperimentConfig, X, rng):
    """Orbit-augmented copy stack for relu training.

    Finite groups contribute every element once (fixed across steps);
    continuous groups draw ``augmentation_samples`` fresh Haar elements
    per example.  Returns (P, orbit_ids).
    """
    G = cfg.group
    n = X.shape[0]
    if G.is_finite:
        elems = groups.enumerate_elements(G)
        P = np.concatenate(
            [np.stack([groups.apply(G, g, x) for g in elems]) for x in X]
        )
        ids = np.repeat(np.arange(n), len(elems))
        return P, ids
    a = cfg.augmentation_samples
    rows = []
    for x in X:
        for g in groups.sample_elements(G, a, rng):
            rows.append(groups.apply(G, g, x))
    return np.array(rows), np.repeat(np.arange(n), a)


def _forward(cfg: ExperimentConfig, params: dict, P: np.ndarray):
    if cfg.arch == "relu":
        H = P @ params["W"].T
        R = np.maximum(H, 0.0)
        return R @ params["L"].T, {"R": R}
    V = groups.batch_inner_max(cfg.group, P, params["templates"])
    if cfg.arch == "mf":
        return V, {"V": V}
    return V @ params["L"].T, {"V": V}


def _pair_gradient(cfg, params, P, F, cache, a, b, sign, grads):
    """Accumulate d(sign * log |f(a) - f(b)|)/d params into grads."""
    delta = F[a] - F[b]
    u = sign * delta / max(float(delta @ delta), _EPS)
    if cfg.arch == "relu":
        R, W, L = cache["R"], params["W"], params["L"]
        if "L" in grads:
            grads["L"] += np.outer(u, R[a] - R[b])
        z = L.T @ u
        ga = (z * (R[a] > 0.0))[:, None] * P[a][None, :]
        gb = (z * (R[b] > 0.0))[:, None] * P[b][None, :]
        grads["W"] += ga - gb
        return
    V = cache["V"]
    if cfg.arch in ("lrmf", "lmf") and "L" in grads:
        grads["L"] += np.outer(u, V[a] - V[b])
    if "templates" in grads:
        bank = FilterBank(cfg.group, params["templates"])
        UA = filters.bank_aligned_inputs(bank, P[a])
        UB = filters.bank_aligned_inputs(bank, P[b])
        w = u if cfg.arch == "mf" else params["L"].T @ u
        grads["templates"] += w[:, None] * (UA - UB)


def _model_from_params(cfg: ExperimentConfig, params: dict) -> EmbeddingModel:
    if cfg.arch == "mf":
        return embeddings.bank_model(FilterBank(cfg.group, params["templates"]))
    if cfg.arch in ("lrmf", "lmf"):
        return embeddings.linear_bank_model(
            LinearMap(params["L"]), FilterBank(cfg.group, params["templates"])
        )
    return embeddings.relu_model(
        params["W"], LinearMap(params["L"]), group=cfg.group
    )


def train(cfg: ExperimentConfig, X_train, init: dict | None = None) -> TrainResult:
    """Best-of-restarts subgradient training on the given point set.

    ``init`` warm-starts restart 0 (remaining restarts draw fresh
    parameters).  Identical config, seed and data give bitwise-identical
    results.
    """
    X = np.atleast_2d(np.asarray(X_train, dtype=np.float64))
    if cfg.scale_norm:
        mean_norm = float(np.mean(np.linalg.norm(X, axis=1)))
        if mean_norm > 0:
            X = X / mean_norm
    G = cfg.group
    seed = cfg.seed

    qd_base = metrics.quotient_dist_matrix(G, X)

    best_global = None
    best_global_dist = np.inf
    restart_dists = []

    for ri in range(cfg.restarts):
        rng_init = cfg_mod.stream(seed, f"train/restart{ri}/init")
        rng_pairs = cfg_mod.stream(seed, f"train/restart{ri}/pairs")
        rng_aug = cfg_mod.stream(seed, f"train/restart{ri}/aug")
        params = _init_params(cfg, rng_init, init if ri == 0 else None)

        if cfg.arch == "relu":
            P, ids = _augmented_points(cfg, X, rng_aug)
            n_aug = P.shape[0]
            iu, ju = np.triu_indices(n_aug, 1)
            Qfull = metrics.quotient_dist_matrix(G, X, condensed=False)
            qvec = Qfull[ids[iu], ids[ju]]
            mask = (ids[iu] != ids[ju]) & (qvec > distortion.DROP_TOL)
        else:
            P, ids = X, None
            qvec = qd_base
            mask = qvec > distortion.DROP_TOL
        if not mask.any():
            raise ValueError("all training pairs coincide in the quotient")
        valid_idx = np.flatnonzero(mask)
        n_pts = P.shape[0]

        opt = _Adam([params[k] for k in _trainable(cfg)], cfg.learning_rate)
        best_params = {k: v.copy() for k, v in params.items()}
        best_dist = np.inf

        for step in range(cfg.steps + 1):
            if cfg.arch == "relu" and not G.is_finite and step > 0:
                P, _ = _augmented_points(cfg, X, rng_aug)
            F, cache = _forward(cfg, params, P)

            if cfg.batch_pairs > 0 and step < cfg.steps:
                sel = valid_idx[
                    rng_pairs.integers(0, valid_idx.size, size=cfg.batch_pairs)
                ]
            else:
                sel = valid_idx
            ed = pdist(F)[sel]
            ratios = ed / qvec[sel]
            jmax = int(np.argmax(ratios))
            jmin = int(np.argmin(ratios))
            beta = float(ratios[jmax])
            alpha = float(ratios[jmin])
            dist = beta / alpha if alpha > 0 else np.inf
            if dist < best_dist:
                best_dist = dist
                best_params = {k: v.copy() for k, v in params.items()}
            if step == cfg.steps:
                break

            grads = {k: np.zeros_like(params[k]) for k in _trainable(cfg)}
            a_mx, b_mx = metrics.condensed_pair(n_pts, int(sel[jmax]))
            a_mn, b_mn = metrics.condensed_pair(n_pts, int(sel[jmin]))
            _pair_gradient(cfg, params, P, F, cache, a_mx, b_mx, +1.0, grads)
            _pair_gradient(cfg, params, P, F, cache, a_mn, b_mn, -1.0, grads)
            opt.step([params[k] for k in _trainable(cfg)], list(grads.values()))
            if cfg.arch == "mf":
                T = params["templates"]
                nrm = np.linalg.norm(T, axis=1, keepdims=True)
                np.divide(T, np.where(nrm > 0, nrm, 1.0), out=T)

        restart_dists.append(best_dist)
        if best_dist < best_global_dist:
            best_global_dist = best_dist
            best_global = best_params

    return TrainResult(
        model=_model_from_params(cfg, best_global),
        train_dist=float(best_global_dist),
        restart_dists=[float(v) for v in restart_dists],
        arch=cfg.arch,
    )


def evaluate(
    model: EmbeddingModel, G: GroupSpec, X_test, seed: int | None = None
) -> distortion.DistortionReport:
    """Empirical distortion of a model on a held-out set."""
    return distortion.empirical_distortion(model, G, X_test, seed=seed)


def rmf_search(
    G: GroupSpec,
    m: int,
    n_draws: int,
    X_test,
    seed: int,
) -> tuple[EmbeddingModel, distortion.DistortionReport]:
    """Best random max filter bank out of ``n_draws`` template draws.

    Templates are independent uniform directions (Gaussian rows scaled
    to unit norm).  Draws come sequentially from one named stream, so a
    longer search extends a shorter one with the same seed and the best
    distortion is non-increasing in ``n_draws``.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    X = np.atleast_2d(np.asarray(X_test, dtype=np.float64))
    rng = cfg_mod.stream(seed, "rmf/templates")
    qvec = metrics.quotient_dist_matrix(G, X)
    mask = qvec > distortion.DROP_TOL
    if not mask.any():
        raise ValueError("all pairs coincide in the quotient")

    best_T = None
    best_dist = np.inf
    for _ in range(n_draws):
        T = rng.standard_normal((m, G.ambient_dim))
        T /= np.linalg.norm(T, axis=1, keepdims=True)
        V = groups.batch_inner_max(G, X, T)
        alpha, beta = _kernels.ratio_extremes(V, qvec, mask)
        dist = beta / alpha if alpha > 0 else np.inf
        if dist < best_dist:
            best_dist = dist
            best_T = T

    model = embeddings.bank_model(FilterBank(G, best_T))
    report = distortion.empirical_distortion(model, G, X, seed=seed)
    return model, report
