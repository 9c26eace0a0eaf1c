"""Backend dispatch for the hot numeric kernels.

Two interchangeable implementations exist: numba-compiled loops
(``numba_impl``) and vectorized numpy (``numpy_impl``).  The backend is
chosen once at import time from the ``ORBITMAP_BACKEND`` environment
variable:

    auto   prefer numba, fall back to numpy if numba is unavailable (default)
    numba  require numba, raise if it cannot be imported
    numpy  pure numpy, numba is never imported

``load_backend(name)`` gives explicit access to either implementation,
used by the benchmark and the cross-backend agreement tests.
"""

import os

import numpy as np

_CHOICE = os.environ.get("ORBITMAP_BACKEND", "auto").strip().lower()
if _CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(f"ORBITMAP_BACKEND must be auto, numba or numpy, got {_CHOICE!r}")


def load_backend(name):
    """Import and return a kernel implementation module by name."""
    if name == "numba":
        from . import numba_impl

        return numba_impl
    if name == "numpy":
        from . import numpy_impl

        return numpy_impl
    raise ValueError(f"unknown backend {name!r}")


if _CHOICE == "numpy":
    _impl = load_backend("numpy")
    BACKEND = "numpy"
elif _CHOICE == "numba":
    _impl = load_backend("numba")
    BACKEND = "numba"
else:
    try:
        _impl = load_backend("numba")
        BACKEND = "numba"
    except ImportError:
        _impl = load_backend("numpy")
        BACKEND = "numpy"


def backend_name() -> str:
    """The kernel backend selected at import time."""
    return BACKEND


def _f2(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {X.shape}")
    return X


def _f3(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise ValueError(f"expected a 3-d array, got shape {X.shape}")
    return X


def _c2(Z):
    Z = np.ascontiguousarray(Z, dtype=np.complex128)
    if Z.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {Z.shape}")
    return Z


def euclidean_condensed(X):
    return _impl.euclidean_condensed(_f2(X))


def signflip_condensed(X):
    return _impl.signflip_condensed(_f2(X))


def hyperocta_condensed(X):
    return _impl.hyperocta_condensed(_f2(X))


def min_over_orbits_condensed(X, orbits):
    return _impl.min_over_orbits_condensed(_f2(X), _f3(orbits))


def phase_condensed(Z):
    return _impl.phase_condensed(_c2(Z))


def tuple_condensed(Xb):
    return _impl.tuple_condensed(_f3(Xb))


def shape_condensed(Xb):
    return _impl.shape_condensed(_f3(Xb))


def orbit_bank_values(X, T_orbit):
    return _impl.orbit_bank_values(_f2(X), _f3(T_orbit))


def phase_bank_values(Z, T):
    return _impl.phase_bank_values(_c2(Z), _c2(T))


def tuple_bank_values(Xb, Tb):
    return _impl.tuple_bank_values(_f3(Xb), _f3(Tb))


def shape_bank_values(Xb, Tb):
    return _impl.shape_bank_values(_f3(Xb), _f3(Tb))


def ratio_extremes(V, q, mask):
    V = _f2(V)
    q = np.ascontiguousarray(q, dtype=np.float64)
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    if q.ndim != 1 or mask.shape != q.shape:
        raise ValueError("q and mask must be matching condensed 1-d arrays")
    if q.size != V.shape[0] * (V.shape[0] - 1) // 2:
        raise ValueError("condensed length does not match the point count")
    if not mask.any():
        raise ValueError("mask keeps no pairs")
    return _impl.ratio_extremes(V, q, mask)


KERNEL_NAMES = (
    "euclidean_condensed",
    "signflip_condensed",
    "hyperocta_condensed",
    "min_over_orbits_condensed",
    "phase_condensed",
    "tuple_condensed",
    "shape_condensed",
    "orbit_bank_values",
    "phase_bank_values",
    "tuple_bank_values",
    "shape_bank_values",
    "ratio_extremes",
)
