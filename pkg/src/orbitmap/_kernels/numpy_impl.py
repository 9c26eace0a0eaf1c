"""Vectorized numpy implementations of the hot kernels.

Each function here has a loop-level twin in ``numba_impl``; the pair is
kept semantically identical (same clamping, same tie behaviour through
first-argmax) so the backends agree to rounding.  Inputs are normalized
by the wrappers in ``orbitmap._kernels``.
"""

import numpy as np
from scipy.spatial.distance import cdist, pdist

# pair block sizes chosen to keep scratch arrays well under ~100 MB
_PAIR_BLOCK = 1 << 18


def euclidean_condensed(X):
    return pdist(X)


def signflip_condensed(X):
    n = X.shape[0]
    iu = np.triu_indices(n, 1)
    dplus = cdist(X, -X)[iu]
    return np.minimum(pdist(X), dplus)


def hyperocta_condensed(X):
    return pdist(np.abs(X))


def min_over_orbits_condensed(X, orbits):
    # orbits[j, g] = g . X[j]; d_ij = min_g |x_i - g x_j|
    n = X.shape[0]
    iu = np.triu_indices(n, 1)
    best = np.full(iu[0].shape, np.inf)
    for g in range(orbits.shape[1]):
        np.minimum(best, cdist(X, orbits[:, g, :])[iu], out=best)
    return best


def phase_condensed(Z):
    # Z complex (n, d); d^2 = |x|^2 + |y|^2 - 2 |<x, y>_C|
    sq = np.einsum("ij,ij->i", Z.conj(), Z).real
    gram = np.abs(np.conj(Z) @ Z.T)
    iu = np.triu_indices(Z.shape[0], 1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    return np.sqrt(np.maximum(d2[iu], 0.0))


def _nuclear_2x2(M):
    # sum of singular values of a 2x2 block: sqrt(|M|_F^2 + 2 |det M|)
    fro2 = np.einsum("...ab,...ab->...", M, M)
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return np.sqrt(np.maximum(fro2 + 2.0 * np.abs(det), 0.0))


def tuple_condensed(Xb):
    # Xb: (n, k, d), O(d) acting diagonally on k-tuples
    n, k, d = Xb.shape
    sq = np.einsum("nkd,nkd->n", Xb, Xb)
    iu, ju = np.triu_indices(n, 1)
    out = np.empty(iu.size)
    step = max(1, _PAIR_BLOCK // max(1, d * d))
    for s in range(0, iu.size, step):
        i = iu[s : s + step]
        j = ju[s : s + step]
        M = np.einsum("pka,pkb->pab", Xb[j], Xb[i])
        if d == 2:
            nuc = _nuclear_2x2(M)
        else:
            nuc = np.linalg.svd(M, compute_uv=False).sum(axis=-1)
        d2 = sq[i] + sq[j] - 2.0 * nuc
        out[s : s + step] = np.sqrt(np.maximum(d2, 0.0))
    return out


def shape_condensed(Xb):
    # Xb: (n, k, 2), O(2) x C_k; alignment over shifts via circular correlation
    n, k, _ = Xb.shape
    F = np.fft.rfft(Xb, axis=1)
    sq = np.einsum("nkd,nkd->n", Xb, Xb)
    iu, ju = np.triu_indices(n, 1)
    out = np.empty(iu.size)
    step = max(1, _PAIR_BLOCK // max(1, 4 * k))
    for s in range(0, iu.size, step):
        i = iu[s : s + step]
        j = ju[s : s + step]
        # M_sh[a, b] = sum_t Y[t - sh, a] X[t, b] with Y = Xb[j], X = Xb[i]
        C = np.conj(F[j])[:, :, :, None] * F[i][:, :, None, :]
        M = np.fft.irfft(C, n=k, axis=1)
        nuc = _nuclear_2x2(M).max(axis=1)
        d2 = sq[i] + sq[j] - 2.0 * nuc
        out[s : s + step] = np.sqrt(np.maximum(d2, 0.0))
    return out


def orbit_bank_values(X, T_orbit):
    # X: (N, d); T_orbit: (m, n_g, d) stacked template orbits
    m, n_g, d = T_orbit.shape
    vals = X @ T_orbit.reshape(m * n_g, d).T
    return vals.reshape(X.shape[0], m, n_g).max(axis=2)


def phase_bank_values(Z, T):
    return np.abs(np.conj(Z) @ T.T)


def tuple_bank_values(Xb, Tb):
    n, k, d = Xb.shape
    m = Tb.shape[0]
    out = np.empty((n, m))
    step = max(1, _PAIR_BLOCK // max(1, m * d * d))
    for s in range(0, n, step):
        M = np.einsum("mka,pkb->pmab", Tb, Xb[s : s + step])
        if d == 2:
            out[s : s + step] = _nuclear_2x2(M)
        else:
            out[s : s + step] = np.linalg.svd(M, compute_uv=False).sum(axis=-1)
    return out


def shape_bank_values(Xb, Tb):
    n, k, _ = Xb.shape
    m = Tb.shape[0]
    FT = np.conj(np.fft.rfft(Tb, axis=1))
    out = np.empty((n, m))
    step = max(1, _PAIR_BLOCK // max(1, 4 * k * m))
    for s in range(0, n, step):
        FX = np.fft.rfft(Xb[s : s + step], axis=1)
        C = FT[None, :, :, :, None] * FX[:, None, :, None, :]
        M = np.fft.irfft(C, n=k, axis=2)
        out[s : s + step] = _nuclear_2x2(M).max(axis=2)
    return out


def ratio_extremes(V, q, mask):
    # min and max of |V_i - V_j| / q over masked condensed pairs
    keep = mask != 0
    r = pdist(V)[keep] / q[keep]
    return float(r.min()), float(r.max())
