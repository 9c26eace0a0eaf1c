"""Low-distortion Euclidean embeddings of orbit spaces R^d / G.

A compact group G of orthogonal transformations identifies points of
R^d along its orbits; the quotient carries the metric
d([x], [y]) = min_g |x - g y|.  This package computes that metric in
closed form for the standard group families, builds and trains max
filter bank embeddings with exact subgradients, evaluates empirical
bilipschitz distortion, and certifies the harmonic-analysis identities
behind the constructions.
"""

from ._kernels import backend_name, load_backend
from .config import ExperimentConfig, atomic_write_text, gaussian_points, stream
from .distortion import (
    DistortionReport,
    WeylReport,
    empirical_distortion,
    pair_ratios,
    weyl_check,
)
from .embeddings import (
    EmbeddingModel,
    bank_model,
    herm_flatten,
    hpoly_invariant,
    hpoly_model,
    linear_bank_model,
    optimal_planar,
    optimal_planar_distortion,
    optimal_planar_model,
    optimal_psd,
    optimal_psd_model,
    poly_invariant,
    poly_model,
    relu_model,
    sym_flatten,
    weyl_sort,
    weyl_sort_model,
)
from .filters import (
    FilterBank,
    LinearMap,
    bank_apply,
    bank_batch,
    bank_subgradient,
    bank_tie_gap,
    lmf_apply,
    lmf_batch,
    max_filter,
    sort_bank,
    sort_recovery,
)
from .groups import (
    GroupSpec,
    apply,
    argmax_inner,
    cyclic_shift,
    enumerate_elements,
    explicit_finite,
    hyperoctahedral_signs,
    orthogonal_tuple,
    permutation,
    phase_circle,
    planar_rotation,
    sample_elements,
    shape_group,
    sign_flip,
)
from .harmonic import (
    GegenbauerTable,
    SpherePartition,
    TrigPolynomial,
    deconvolve,
    gegenbauer_table,
    kernel_fourier,
    kernel_fourier_coeff,
    lip_norm_estimate,
    make_partition,
    max_kernel,
    planar_psd_riemann_model,
    pr_coefficient_q,
    riemann_bank,
    riemann_rate_check,
    sphere_surface,
    verify_integral_identity,
    zonal_reproduction_check,
)
from .metrics import (
    MetricAxiomReport,
    check_metric_axioms,
    quotient_dist,
    quotient_dist_enumerated,
    quotient_dist_matrix,
)
from .shapes import (
    PolygonShape,
    pca_project,
    preprocess,
    resample_closed,
    shape_embed,
    synth_shapes,
)
from .training import TrainResult, evaluate, rmf_search, train

__version__ = "0.1.0"
