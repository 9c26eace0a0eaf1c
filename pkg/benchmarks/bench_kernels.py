"""Benchmark the numba and numpy kernel backends against each other.

Each registered kernel is timed on a representative mid-size input with
best-of-N wall clock timing (one untimed warmup call per backend first,
so numba JIT compilation is not counted).  Run from the repo root:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from orbitmap import _kernels, groups
from orbitmap.config import stream

rng = stream(7, "bench/kernels")


def bench_inputs():
    """(kernel name, args, size label) for every registered kernel."""
    cases = []

    X = rng.standard_normal((512, 8))
    cases.append(("euclidean_condensed", (X,), "n=512 d=8"))
    cases.append(("signflip_condensed", (X,), "n=512 d=8"))
    cases.append(("hyperocta_condensed", (X,), "n=512 d=8"))

    G = groups.permutation(6)
    Xp = rng.standard_normal((128, 6))
    cases.append(
        ("min_over_orbits_condensed", (Xp, groups.orbit_stack(G, Xp)),
         "n=128 |G|=720 d=6")
    )

    Z = rng.standard_normal((256, 8)) + 1j * rng.standard_normal((256, 8))
    cases.append(("phase_condensed", (Z,), "n=256 d=8"))

    cases.append(
        ("tuple_condensed", (rng.standard_normal((128, 8, 2)),), "n=128 k=8")
    )
    cases.append(
        ("shape_condensed", (rng.standard_normal((96, 32, 2)),), "n=96 k=32")
    )

    Gc = groups.cyclic_shift(16)
    Xc = rng.standard_normal((1024, 16))
    Tc = rng.standard_normal((32, 16))
    cases.append(
        ("orbit_bank_values", (Xc, groups.orbit_stack(Gc, Tc)),
         "n=1024 m=32 |G|=16 d=16")
    )

    Zb = rng.standard_normal((512, 8)) + 1j * rng.standard_normal((512, 8))
    Tz = rng.standard_normal((64, 8)) + 1j * rng.standard_normal((64, 8))
    cases.append(("phase_bank_values", (Zb, Tz), "n=512 m=64 d=8"))

    cases.append(
        ("tuple_bank_values",
         (rng.standard_normal((256, 4, 2)), rng.standard_normal((32, 4, 2))),
         "n=256 m=32 k=4")
    )
    cases.append(
        ("shape_bank_values",
         (rng.standard_normal((256, 16, 2)), rng.standard_normal((32, 16, 2))),
         "n=256 m=32 k=16")
    )

    V = rng.standard_normal((512, 16))
    n_pairs = 512 * 511 // 2
    q = rng.uniform(0.5, 2.0, n_pairs)
    mask = (rng.uniform(size=n_pairs) > 0.1).astype(np.uint8)
    cases.append(("ratio_extremes", (V, q, mask), "n=512 m=16"))

    assert {c[0] for c in cases} == set(_kernels.KERNEL_NAMES)
    return cases


def best_of(fn, args, repeats):
    fn(*args)  # warmup (JIT compile, caches)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n", 1)[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="timed calls per kernel per backend (best is kept)")
    args = ap.parse_args()

    numpy_backend = _kernels.load_backend("numpy")
    try:
        numba_backend = _kernels.load_backend("numba")
    except ImportError:
        numba_backend = None
        print("numba not installed: timing the numpy backend only\n")

    header = f"{'kernel':<28} {'size':<24} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, call_args, label in bench_inputs():
        t_np = best_of(getattr(numpy_backend, name), call_args, args.repeats)
        if numba_backend is None:
            print(f"{name:<28} {label:<24} {t_np * 1e3:>10.3f} {'-':>10} {'-':>8}")
            continue
        t_nb = best_of(getattr(numba_backend, name), call_args, args.repeats)
        print(
            f"{name:<28} {label:<24} {t_np * 1e3:>10.3f} {t_nb * 1e3:>10.3f} "
            f"{t_np / t_nb:>7.2f}x"
        )


if __name__ == "__main__":
    main()
