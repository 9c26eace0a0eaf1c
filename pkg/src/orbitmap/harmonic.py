"""Harmonic-analysis certificates for max filter banks.

Three families of computation live here.

Planar (circle) deconvolution.  The max filter of unit templates under
the cyclic rotation group C_r is convolution against the kernel

    f(theta) = cos(theta) on [-pi/r, pi/r], extended 2 pi / r periodically,

whose Fourier coefficients vanish off multiples of r and are known in
closed form on them.  ``deconvolve`` inverts this convolution on
rotation-invariant trigonometric polynomials, and
``verify_integral_identity`` certifies a candidate density by direct
quadrature.

Sphere zonal calculus.  Gegenbauer polynomials G_k (orthogonal under
(1 - t^2)^((d-3)/2), normalized G_k(1) = 1) give the coefficients

    c_k = omega_{d-2} * int_{-1}^{1} |t| G_k(t) (1 - t^2)^((d-3)/2) dt

of |<x, .>| against normalized zonal harmonics; for even-degree
harmonic p the density q = p / c_k reproduces p through
p(x) = int q(y) |<x, y>| d omega(y) over the unit sphere with its
(unnormalized) surface measure.

Riemann-sum banks.  A partition of the sphere with small cells turns
the integral representation into a finite max filter bank whose
Lipschitz error decays linearly in the cell diameter;
``riemann_rate_check`` measures that rate empirically.

Measure conventions: omega is always the surface measure (total mass
omega_{d-1} = |S^{d-1}|, so 2 pi on the circle).  Circle densities
stated against the uniform probability measure are converted at this
boundary by the factor 1 / (2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre
from numpy.polynomial.polynomial import polyval
from scipy import integrate
from scipy.stats import qmc

from . import config as cfg_mod
from . import embeddings, filters, groups
from .embeddings import EmbeddingModel
from .filters import FilterBank, LinearMap

SQRT2 = float(np.sqrt(2.0))


def sphere_surface(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return float(2.0 * np.pi ** (n / 2.0) / math.gamma(n / 2.0))


@lru_cache(maxsize=None)
def leggauss(n: int):
    # node computation is costly at large n; the same sizes recur across segments
    return roots_legendre(n)


# ---------------------------------------------------------------------------
# the planar max filter kernel and its Fourier data

def max_kernel(r: int, theta) -> np.ndarray:
    """The C_r max filter kernel: f(theta) = max_j cos(theta - 2 pi j / r)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    theta = np.asarray(theta, dtype=np.float64)
    nearest = np.round(theta * r / (2.0 * np.pi))
    return np.cos(theta - 2.0 * np.pi * nearest / r)


def kernel_fourier(r: int, m: int) -> float:
    """Closed-form Fourier coefficient f^(r m) of the C_r kernel.

    f^(r m) = (-1)^(m+1) (r / pi) sin(pi / r) / ((r m)^2 - 1); the
    m = 0 value is (r / pi) sin(pi / r).  Coefficients are taken
    against the uniform probability measure on the circle.
    """
    if r < 2:
        raise ValueError("the kernel Fourier form needs r >= 2")
    k = r * int(m)
    return float((-1) ** (abs(m) + 1) * (r / np.pi) * np.sin(np.pi / r) / (k * k - 1))


def kernel_fourier_coeff(r: int, k: int) -> float:
    """f^(k) for any integer frequency: zero unless r divides k."""
    if k % r != 0:
        return 0.0
    return kernel_fourier(r, k // r)


def kernel_fourier_quadrature(r: int, k: int, nodes_per_piece: int = 64) -> complex:
    """Independent quadrature oracle for f^(k).

    The kernel is smooth on each of the r arcs between its kinks, so
    Gauss-Legendre on each piece converges to machine precision.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    x, w = leggauss(nodes_per_piece)
    total = 0.0 + 0.0j
    half = np.pi / r
    for j in range(r):
        center = 2.0 * np.pi * j / r
        theta = center + half * x
        weight = half * w
        total += np.sum(np.cos(theta - center) * np.exp(-1j * k * theta) * weight)
    return complex(total / (2.0 * np.pi))


# ---------------------------------------------------------------------------
# trigonometric polynomials

@dataclass
class TrigPolynomial:
    """Real trigonometric polynomial sum_k c_k e^{i k theta}, |k| <= K.

    Coefficients are stored as a complex array indexed K + k and must
    be conjugate-symmetric (checked) so evaluation is real.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coeffs must be a 1-d array of odd length")
        K = c.size // 2
        sym = c[::-1].conj()
        if np.max(np.abs(c - sym)) > 1e-9 * max(1.0, np.max(np.abs(c))):
            raise ValueError("coefficients are not conjugate-symmetric")
        self.coeffs = c

    @property
    def K(self) -> int:
        return self.coeffs.size // 2

    @classmethod
    def zero(cls, K: int) -> "TrigPolynomial":
        return cls(np.zeros(2 * K + 1, dtype=np.complex128))

    @classmethod
    def from_terms(cls, K: int, const=0.0, cos=None, sin=None) -> "TrigPolynomial":
        """Build from real cosine/sine amplitude dicts {k: amplitude}."""
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        c[K] = const
        for k, amp in (cos or {}).items():
            c[K + k] += amp / 2.0
            c[K - k] += amp / 2.0
        for k, amp in (sin or {}).items():
            c[K + k] += amp / (2.0j)
            c[K - k] -= amp / (2.0j)
        return cls(c)

    @classmethod
    def from_samples(cls, values, K: int) -> "TrigPolynomial":
        """Coefficients from uniform circle samples (exact for degree <= K).

        The trapezoid rule on a full period is the DFT, spectrally
        accurate for trigonometric polynomials; at least 2K + 1 samples
        are required.
        """
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n < 2 * K + 1:
            raise ValueError(f"need at least {2 * K + 1} samples, got {n}")
        fhat = np.fft.fft(values) / n
        c = np.zeros(2 * K + 1, dtype=np.complex128)
        c[K] = fhat[0]
        for k in range(1, K + 1):
            c[K + k] = fhat[k]
            c[K - k] = fhat[n - k]
        return cls(c)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.K:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.K + k])

    def with_coeff(self, k: int, value) -> "TrigPolynomial":
        c = self.coeffs.copy()
        c[self.K + k] = value
        c[self.K - k] = np.conj(value)
        return TrigPolynomial(c)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        ks = np.arange(-self.K, self.K + 1)
        vals = np.exp(1j * np.multiply.outer(theta, ks)) @ self.coeffs
        return vals.real if theta.ndim else float(vals.real)

    def invariant_order_violation(self, r: int) -> float:
        """Largest |c_k| off the multiples of r (zero means C_r-invariant)."""
        worst = 0.0
        for k in range(-self.K, self.K + 1):
            if k % r != 0:
                worst = max(worst, abs(self.coeff(k)))
        return worst


def deconvolve(r: int, g: TrigPolynomial, tol: float = 1e-10) -> TrigPolynomial:
    """Solve g = (1/2pi) int c(phi) f(theta - phi) dphi for c.

    Divides Fourier coefficients on the invariant support (multiples of
    r, where the kernel never vanishes); raises if g carries mass off
    that support.
    """
    off = g.invariant_order_violation(r)
    if off > tol:
        raise ValueError(
            f"g is not C_{r}-invariant: off-support coefficient mass {off:.3e}"
        )
    c = np.zeros_like(g.coeffs)
    K = g.K
    for k in range(-K, K + 1):
        if k % r == 0:
            c[K + k] = g.coeff(k) / kernel_fourier_coeff(r, k)
    return TrigPolynomial(c)


def convolve_kernel_exact(r: int, c: TrigPolynomial) -> TrigPolynomial:
    """g with g^ = c^ * f^; the forward map of ``deconvolve``."""
    out = np.zeros_like(c.coeffs)
    K = c.K
    for k in range(-K, K + 1):
        out[K + k] = c.coeff(k) * kernel_fourier_coeff(r, k)
    return TrigPolynomial(out)


def convolve_kernel_quadrature(
    r: int, c: TrigPolynomial, theta: float, n_quad: int = 4096
) -> float:
    """(1/2pi) int_0^{2pi} c(phi) f(theta - phi) dphi by direct quadrature.

    The integrand has kinks where theta - phi crosses the kernel's arc
    boundaries; the quadrature splits at those phi and applies
    Gauss-Legendre on each smooth piece, so the budget n_quad reaches
    far past the 1e-6 scale.
    """
    kinks = np.sort((theta - (2.0 * np.arange(r) + 1.0) * np.pi / r) % (2.0 * np.pi))
    x, w = leggauss(max(4, n_quad // max(1, r)))
    total = 0.0
    for i in range(len(kinks)):
        lo = kinks[i]
        hi = kinks[(i + 1) % len(kinks)]
        if i == len(kinks) - 1:
            hi += 2.0 * np.pi
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        phi = mid + half * x
        total += half * float(
            np.sum(w * c.evaluate(phi) * max_kernel(r, theta - phi))
        )
    return total / (2.0 * np.pi)


def verify_integral_identity(
    r: int,
    g: TrigPolynomial,
    c: TrigPolynomial,
    n_theta: int = 256,
    n_quad: int = 4096,
) -> float:
    """Sup over a theta grid of |quadrature convolution of c - g(theta)|."""
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    worst = 0.0
    for t in thetas:
        approx = convolve_kernel_quadrature(r, c, float(t), n_quad)
        worst = max(worst, abs(approx - float(g.evaluate(t))))
    return worst


# the worked planar identities for r = 2
def planar_identity_targets() -> dict:
    """The three pi-periodic degree-2 targets and their exact densities."""
    g_cos2 = TrigPolynomial.from_terms(2, const=0.5, cos={2: 0.5})
    g_sin2 = TrigPolynomial.from_terms(2, const=0.5, cos={2: -0.5})
    g_cs = TrigPolynomial.from_terms(2, sin={2: 0.5})
    c_cos2 = TrigPolynomial.from_terms(
        2, const=np.pi / 4.0, cos={2: 3.0 * np.pi / 4.0}
    )
    c_sin2 = TrigPolynomial.from_terms(
        2, const=np.pi / 4.0, cos={2: -3.0 * np.pi / 4.0}
    )
    c_cs = TrigPolynomial.from_terms(2, sin={2: 3.0 * np.pi / 4.0})
    return {
        "cos2": (g_cos2, c_cos2),
        "sin2": (g_sin2, c_sin2),
        "cossin": (g_cs, c_cs),
    }


# ---------------------------------------------------------------------------
# Gegenbauer table and the zonal reproduction coefficients

@dataclass
class GegenbauerTable:
    """G_0 .. G_K for dimension d, with the |t| projection coefficients.

    ``polys[k]`` holds ascending power coefficients of G_k (exact
    rational Gram-Schmidt, converted to float).  ``raw_integrals[k]``
    is int |t| G_k w dt and ``c[k] = omega_{d-2} * raw_integrals[k]``.
    """

    d: int
    K: int
    polys: list
    raw_integrals: np.ndarray
    c: np.ndarray

    def evaluate(self, k: int, t) -> np.ndarray:
        return polyval(np.asarray(t, dtype=np.float64), self.polys[k])


def _gegenbauer_polys_exact(d: int, K: int) -> list:
    # moments of the weight: mu[2j] / mu[0] = prod (2i+1)/(2i+d), exact
    mu = [Fraction(0)] * (2 * K + 1)
    mu[0] = Fraction(1)
    for j in range(1, K + 1):
        mu[2 * j] = mu[2 * j - 2] * Fraction(2 * j - 1, 2 * j - 2 + d)

    def inner(p, q):
        s = Fraction(0)
        for a, pa in enumerate(p):
            if pa == 0:
                continue
            for b, qb in enumerate(q):
                if qb == 0:
                    continue
                s += pa * qb * mu[a + b]
        return s

    polys = [[Fraction(1)]]
    for j in range(1, K + 1):
        p = [Fraction(0)] * j + [Fraction(1)]
        for G in polys:
            coef = inner(p, G) / inner(G, G)
            for a, ga in enumerate(G):
                p[a] -= coef * ga
        at_one = sum(p)
        polys.append([v / at_one for v in p])
    return polys


def gegenbauer_table(d: int, K: int) -> GegenbauerTable:
    """Orthogonal polynomials under (1-t^2)^((d-3)/2) with G_k(1) = 1.

    The Gram-Schmidt runs in exact rational arithmetic (the moment
    ratios of the weight are rational), so the coefficients carry no
    accumulation error; the |t| projections use adaptive quadrature
    with the kink at 0 declared.
    """
    if d < 3:
        raise ValueError("the zonal calculus needs d >= 3")
    if K < 0:
        raise ValueError("K must be >= 0")
    exact = _gegenbauer_polys_exact(d, K)
    polys = [np.array([float(v) for v in p]) for p in exact]
    beta = (d - 3) / 2.0

    raw = np.empty(K + 1)
    for k in range(K + 1):
        def integrand(t, pk=polys[k]):
            return abs(t) * polyval(t, pk) * (1.0 - t * t) ** beta

        val, _ = integrate.quad(
            integrand, -1.0, 1.0, points=[0.0], limit=200,
            epsabs=1e-13, epsrel=1e-13,
        )
        raw[k] = val
    omega = sphere_surface(d - 1)
    return GegenbauerTable(d=d, K=K, polys=polys, raw_integrals=raw, c=omega * raw)


def pr_coefficient_q(d: int, k: int, p):
    """Density q = p / c_k reproducing an even-degree-k harmonic p.

    Returns (q, c_k) where q is a callable on sphere points.  With the
    surface measure omega, int q(y) |<x, y>| d omega(y) = p(x) for any
    p in the degree-k harmonic space.
    """
    if k % 2 != 0:
        raise ValueError("odd-degree harmonics are killed by |<x, .>|")
    table = gegenbauer_table(d, k)
    ck = float(table.c[k])
    if abs(ck) < 1e-12:
        raise ValueError(f"c_{k} is numerically zero ({ck:.3e})")

    def q(y):
        return np.asarray(p(y), dtype=np.float64) / ck

    return q, ck


def sphere_samples_qmc(d: int, n: int, seed: int) -> np.ndarray:
    """Scrambled-Sobol low-discrepancy sample of the unit sphere S^{d-1}.

    d = 3 uses the exact area-preserving cylinder map; other dimensions
    map through Gaussian quantiles and normalize.
    """
    rng = cfg_mod.stream(seed, "sphere/qmc")
    if d == 3:
        sob = qmc.Sobol(2, scramble=True, seed=rng)
        U = sob.random(n)
        z = 1.0 - 2.0 * U[:, 0]
        phi = 2.0 * np.pi * U[:, 1]
        rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    from scipy.special import ndtri

    sob = qmc.Sobol(d, scramble=True, seed=rng)
    U = sob.random(n)
    Z = ndtri(np.clip(U, 1e-12, 1.0 - 1e-12))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def sphere_samples_iid(d: int, n: int, seed: int) -> np.ndarray:
    rng = cfg_mod.stream(seed, "sphere/iid")
    Z = rng.standard_normal((n, d))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def zonal_reproduction_check(
    d: int,
    k: int,
    p,
    n_x: int = 20,
    n_samples: int = 1 << 20,
    seed: int = 0,
    sampler: str = "qmc",
) -> dict:
    """Monte-Carlo certificate for the reproduction identity.

    Estimates int (p / c_k)(y) |<x, y>| d omega(y) at ``n_x`` random
    sphere points x and reports the worst relative error against p(x).
    The default sampler is scrambled Sobol (randomized, unbiased, far
    lower variance than iid at the same sample count); ``sampler='iid'``
    gives plain Monte Carlo.
    """
    q, ck = pr_coefficient_q(d, k, p)
    if sampler == "qmc":
        Y = sphere_samples_qmc(d, n_samples, seed)
    elif sampler == "iid":
        Y = sphere_samples_iid(d, n_samples, seed)
    else:
        raise ValueError("sampler must be 'qmc' or 'iid'")
    X = sphere_samples_iid(d, n_x, seed + 1)
    omega_total = sphere_surface(d)
    qY = q(Y)
    dots = np.abs(Y @ X.T)  # (n_samples, n_x)
    est = omega_total * (qY @ dots) / n_samples
    truth = np.asarray(p(X), dtype=np.float64)
    rel = np.abs(est - truth) / np.maximum(np.abs(truth), 1e-30)
    return {
        "c_k": ck,
        "estimates": est,
        "truth": truth,
        "max_rel_error": float(rel.max()),
        "n_samples": int(n_samples),
        "n_x": int(n_x),
    }


# ---------------------------------------------------------------------------
# sphere partitions and Riemann-sum banks

@dataclass
class SpherePartition:
    """Representatives and cell measures of a partition of S^{d-1}.

    d = 2: n equal arcs, exact measures 2 pi / n, diameter 2 sin(pi/n).
    d = 3: Fibonacci lattice with equal nominal measures 4 pi / n; the
    implicit Voronoi cells have diameter O(n^{-1/2}) and the nominal
    measures carry an O(n^{-1/2}) relative error, recorded in
    ``measure_error_note``.
    """

    ambient_dim: int
    n: int
    representatives: np.ndarray
    measures: np.ndarray
    diameter_bound: float
    exact: bool
    measure_error_note: str = ""

    @property
    def total_measure(self) -> float:
        return float(self.measures.sum())


def make_partition(d: int, n: int) -> SpherePartition:
    if n < 1:
        raise ValueError("n must be >= 1")
    if d == 2:
        angles = (np.arange(n) + 0.5) * 2.0 * np.pi / n
        reps = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return SpherePartition(
            ambient_dim=2,
            n=n,
            representatives=reps,
            measures=np.full(n, 2.0 * np.pi / n),
            diameter_bound=float(2.0 * np.sin(np.pi / n)),
            exact=True,
        )
    if d == 3:
        i = np.arange(n)
        z = 1.0 - (2.0 * i + 1.0) / n
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * i
        rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        reps = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
        return SpherePartition(
            ambient_dim=3,
            n=n,
            representatives=reps,
            measures=np.full(n, 4.0 * np.pi / n),
            diameter_bound=float(3.5 / np.sqrt(n)),
            exact=False,
            measure_error_note=(
                "nominal equal-area cells; per-cell measure error is "
                "O(n^-1/2) relative for the Fibonacci lattice"
            ),
        )
    raise ValueError("partitions implemented for d in {2, 3}")


def riemann_bank(G, q, partition: SpherePartition):
    """Finite bank approximating x -> int q(y) <<[x],[y]>> d omega(y).

    Templates are the cell representatives; the 1 x n readout carries
    the weights q(y_k) |I_k|.
    """
    if G.ambient_dim != partition.ambient_dim:
        raise groups.DimensionMismatchError(
            f"{G.describe()} acts on R^{G.ambient_dim}, "
            f"partition lives on S^{partition.ambient_dim - 1}"
        )
    reps = partition.representatives
    weights = np.asarray(q(reps), dtype=np.float64) * partition.measures
    bank = FilterBank(G, reps)
    return bank, LinearMap(weights[None, :])


def planar_psd_riemann_model(n: int) -> EmbeddingModel:
    """Riemann-sum reconstruction of the planar psd embedding.

    Deconvolves the three pi-periodic quadratics (cos^2, sin^2,
    cos sin), stacks the resulting Riemann weights over one bank of n
    circle templates (cross term scaled by sqrt(2) to match the
    isometric matrix flattening), and returns the linear-bank model.
    Its distortion tends to sqrt(2) as n grows.
    """
    targets = planar_identity_targets()
    G = groups.planar_rotation(2)
    part = make_partition(2, n)
    rows = []
    for name, scale in (("cos2", 1.0), ("cossin", SQRT2), ("sin2", 1.0)):
        g, _ = targets[name]
        c = deconvolve(2, g)
        # density against surface measure = c / (2 pi)
        _, L = riemann_bank(
            G, lambda Y, c=c: c.evaluate(np.arctan2(Y[:, 1], Y[:, 0])) / (2 * np.pi),
            part,
        )
        rows.append(scale * L.matrix[0])
    bank = FilterBank(G, part.representatives)
    return embeddings.linear_bank_model(LinearMap(np.stack(rows)), bank)


# ---------------------------------------------------------------------------
# Lipschitz norm estimation

def lip_norm_estimate(
    f,
    d_in: int,
    n_samples: int = 4096,
    seed: int = 0,
    grad=None,
    skip_mask=None,
    fd_step: float = 1e-6,
) -> float:
    """Estimate the Lipschitz norm of a positively homogeneous map.

    Samples the unit sphere, takes gradients (analytic when ``grad`` is
    given, central differences otherwise), skips samples flagged by
    ``skip_mask`` (near nondifferentiability), and returns the largest
    gradient norm seen.  For maps with essentially bounded gradient the
    Lipschitz norm is that essential sup, so sampling from below is the
    honest one-sided estimate.
    """
    X = sphere_samples_iid(d_in, n_samples, seed)
    if skip_mask is not None:
        keep = ~np.asarray(skip_mask(X), dtype=bool)
        X = X[keep]
        if X.shape[0] == 0:
            raise ValueError("all samples were skipped as nondifferentiable")
    if grad is not None:
        Jrows = np.asarray(grad(X), dtype=np.float64)
    else:
        cols = []
        for t in range(d_in):
            e = np.zeros(d_in)
            e[t] = fd_step
            cols.append(
                (np.asarray(f(X + e)) - np.asarray(f(X - e))) / (2.0 * fd_step)
            )
        Jrows = np.stack(cols, axis=-1)
    if Jrows.ndim == 2:
        return float(np.linalg.norm(Jrows, axis=1).max())
    # vector-valued map: spectral norm of each Jacobian
    return float(np.linalg.norm(Jrows, ord=2, axis=(1, 2)).max())


def riemann_rate_check(
    n_values=(32, 64, 128, 256, 512),
    n_samples: int = 4096,
    seed: int = 0,
    tie_tol: float = 1e-9,
) -> dict:
    """Empirical Lipschitz convergence rate of the Riemann-sum bank.

    Reconstructs the homogeneous extension of cos^2 through the n-cell
    circle bank, measures lip(p_hat - p) by analytic subgradients away
    from alignment ties, and regresses log error against log cell
    diameter; a slope near 1 certifies the linear rate.
    """
    targets = planar_identity_targets()
    g, _ = targets["cos2"]
    c = deconvolve(2, g)
    G = groups.planar_rotation(2)

    def p_grad(X):
        # p(x) = x1^2 / |x|
        nrm = np.linalg.norm(X, axis=1, keepdims=True)
        out = np.zeros_like(X)
        out[:, 0] = 2.0 * X[:, 0] / nrm[:, 0]
        out -= (X[:, 0] ** 2 / nrm[:, 0] ** 3)[:, None] * X
        return out

    eps_list, lip_list = [], []
    for n in n_values:
        part = make_partition(2, n)
        bank, L = riemann_bank(
            G,
            lambda Y: c.evaluate(np.arctan2(Y[:, 1], Y[:, 0])) / (2.0 * np.pi),
            part,
        )
        row = L.matrix[0]

        def grad_phat_minus_p(X, bank=bank, row=row):
            sub = filters.bank_subgradient_batch(bank, X)
            return np.einsum("m,nmd->nd", row, sub) - p_grad(X)

        def near_ties(X, bank=bank):
            return filters.bank_tie_gaps(bank, X) < tie_tol

        lip = lip_norm_estimate(
            None,
            2,
            n_samples=n_samples,
            seed=seed,
            grad=grad_phat_minus_p,
            skip_mask=near_ties,
        )
        eps_list.append(part.diameter_bound)
        lip_list.append(lip)

    slope = float(np.polyfit(np.log(eps_list), np.log(lip_list), 1)[0])
    return {
        "n_values": list(n_values),
        "eps": eps_list,
        "lip": lip_list,
        "slope": slope,
    }
