"""Numba twins of the kernels in ``numpy_impl``.

Plain nested loops, no fastmath: results must agree with the numpy
backend to rounding so either one can back the public API.
"""

import numpy as np
import numba as nb

kwd = {"cache": True, "nogil": True}


@nb.njit(**kwd)
def euclidean_condensed(X):
    n, d = X.shape
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for t in range(d):
                diff = X[i, t] - X[j, t]
                s += diff * diff
            out[p] = np.sqrt(s)
            p += 1
    return out


@nb.njit(**kwd)
def signflip_condensed(X):
    n, d = X.shape
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            sm = 0.0
            sp = 0.0
            for t in range(d):
                a = X[i, t] - X[j, t]
                b = X[i, t] + X[j, t]
                sm += a * a
                sp += b * b
            out[p] = np.sqrt(min(sm, sp))
            p += 1
    return out


@nb.njit(**kwd)
def hyperocta_condensed(X):
    n, d = X.shape
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for t in range(d):
                diff = abs(X[i, t]) - abs(X[j, t])
                s += diff * diff
            out[p] = np.sqrt(s)
            p += 1
    return out


@nb.njit(**kwd)
def min_over_orbits_condensed(X, orbits):
    n, n_g, d = orbits.shape
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            best = np.inf
            for g in range(n_g):
                s = 0.0
                for t in range(d):
                    diff = X[i, t] - orbits[j, g, t]
                    s += diff * diff
                if s < best:
                    best = s
            out[p] = np.sqrt(best)
            p += 1
    return out


@nb.njit(**kwd)
def phase_condensed(Z):
    n, d = Z.shape
    sq = np.empty(n)
    for i in range(n):
        s = 0.0
        for t in range(d):
            s += Z[i, t].real * Z[i, t].real + Z[i, t].imag * Z[i, t].imag
        sq[i] = s
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            z = 0.0 + 0.0j
            for t in range(d):
                z += np.conj(Z[i, t]) * Z[j, t]
            d2 = sq[i] + sq[j] - 2.0 * abs(z)
            out[p] = np.sqrt(max(d2, 0.0))
            p += 1
    return out


@nb.njit(inline="always")
def _nuc2x2(m00, m01, m10, m11):
    fro2 = m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11
    det = m00 * m11 - m01 * m10
    v = fro2 + 2.0 * abs(det)
    return np.sqrt(v) if v > 0.0 else 0.0


@nb.njit(**kwd)
def tuple_condensed(Xb):
    n, k, d = Xb.shape
    sq = np.empty(n)
    for i in range(n):
        s = 0.0
        for t in range(k):
            for a in range(d):
                s += Xb[i, t, a] * Xb[i, t, a]
        sq[i] = s
    out = np.empty(n * (n - 1) // 2)
    M = np.empty((d, d))
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            for a in range(d):
                for b in range(d):
                    s = 0.0
                    for t in range(k):
                        s += Xb[j, t, a] * Xb[i, t, b]
                    M[a, b] = s
            if d == 2:
                nuc = _nuc2x2(M[0, 0], M[0, 1], M[1, 0], M[1, 1])
            else:
                nuc = np.linalg.svd(M)[1].sum()
            d2 = sq[i] + sq[j] - 2.0 * nuc
            out[p] = np.sqrt(max(d2, 0.0))
            p += 1
    return out


@nb.njit(**kwd)
def shape_condensed(Xb):
    n, k, _ = Xb.shape
    sq = np.empty(n)
    for i in range(n):
        s = 0.0
        for t in range(k):
            s += Xb[i, t, 0] * Xb[i, t, 0] + Xb[i, t, 1] * Xb[i, t, 1]
        sq[i] = s
    out = np.empty(n * (n - 1) // 2)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            best = -np.inf
            for sh in range(k):
                m00 = 0.0
                m01 = 0.0
                m10 = 0.0
                m11 = 0.0
                for t in range(k):
                    u = t - sh
                    if u < 0:
                        u += k
                    m00 += Xb[j, u, 0] * Xb[i, t, 0]
                    m01 += Xb[j, u, 0] * Xb[i, t, 1]
                    m10 += Xb[j, u, 1] * Xb[i, t, 0]
                    m11 += Xb[j, u, 1] * Xb[i, t, 1]
                nuc = _nuc2x2(m00, m01, m10, m11)
                if nuc > best:
                    best = nuc
            d2 = sq[i] + sq[j] - 2.0 * best
            out[p] = np.sqrt(max(d2, 0.0))
            p += 1
    return out


@nb.njit(**kwd)
def orbit_bank_values(X, T_orbit):
    n, d = X.shape
    m, n_g, _ = T_orbit.shape
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            best = -np.inf
            for g in range(n_g):
                s = 0.0
                for t in range(d):
                    s += X[i, t] * T_orbit[j, g, t]
                if s > best:
                    best = s
            out[i, j] = best
    return out


@nb.njit(**kwd)
def phase_bank_values(Z, T):
    n, d = Z.shape
    m = T.shape[0]
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            z = 0.0 + 0.0j
            for t in range(d):
                z += np.conj(Z[i, t]) * T[j, t]
            out[i, j] = abs(z)
    return out


@nb.njit(**kwd)
def tuple_bank_values(Xb, Tb):
    n, k, d = Xb.shape
    m = Tb.shape[0]
    out = np.empty((n, m))
    M = np.empty((d, d))
    for i in range(n):
        for j in range(m):
            for a in range(d):
                for b in range(d):
                    s = 0.0
                    for t in range(k):
                        s += Tb[j, t, a] * Xb[i, t, b]
                    M[a, b] = s
            if d == 2:
                out[i, j] = _nuc2x2(M[0, 0], M[0, 1], M[1, 0], M[1, 1])
            else:
                out[i, j] = np.linalg.svd(M)[1].sum()
    return out


@nb.njit(**kwd)
def shape_bank_values(Xb, Tb):
    n, k, _ = Xb.shape
    m = Tb.shape[0]
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            best = -np.inf
            for sh in range(k):
                m00 = 0.0
                m01 = 0.0
                m10 = 0.0
                m11 = 0.0
                for t in range(k):
                    u = t - sh
                    if u < 0:
                        u += k
                    m00 += Tb[j, u, 0] * Xb[i, t, 0]
                    m01 += Tb[j, u, 0] * Xb[i, t, 1]
                    m10 += Tb[j, u, 1] * Xb[i, t, 0]
                    m11 += Tb[j, u, 1] * Xb[i, t, 1]
                nuc = _nuc2x2(m00, m01, m10, m11)
                if nuc > best:
                    best = nuc
            out[i, j] = best
    return out


@nb.njit(**kwd)
def ratio_extremes(V, q, mask):
    n, m = V.shape
    lo = np.inf
    hi = -np.inf
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if mask[idx] != 0:
                s = 0.0
                for t in range(m):
                    dv = V[i, t] - V[j, t]
                    s += dv * dv
                r = np.sqrt(s) / q[idx]
                if r < lo:
                    lo = r
                if r > hi:
                    hi = r
            idx += 1
    return lo, hi
