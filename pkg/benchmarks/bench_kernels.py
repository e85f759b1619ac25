"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both versions are called directly, so the environment flag does not matter.
Numba compilation happens in a warm-up call and is not timed.
"""

import argparse
import timeit

import numpy as np

from zpzp import _kernels
from zpzp.coinvariants import level_relation_matrix, load_presentation
from zpzp.orbit import OrbitMatrixParams, build_matrix
from zpzp.skew import TruncationBox, product_tensor


def skew_cases(rng):
    for p, N, D_S, D_T in [(3, 2, 10, 4), (3, 4, 20, 8), (5, 3, 30, 10)]:
        box = TruncationBox(p, N, D_S, D_T)
        O = np.ascontiguousarray(product_tensor(box))
        A = rng.integers(0, box.modulus, size=(D_T, D_S))
        B = rng.integers(0, box.modulus, size=(D_T, D_S))
        yield f"skew_product p={p} N={N} D=({D_S},{D_T})", (A, B, O, box.modulus), "skew_product"


def smith_cases(rng):
    X = load_presentation("elementary_plus_pt_p3")
    for n, N in [(1, 4), (2, 5)]:
        M = np.ascontiguousarray(level_relation_matrix(X, n, N))
        yield f"smith_valuations level matrix {M.shape[0]}x{M.shape[1]}", (M, 3, N), "smith_valuations"
    M = rng.integers(0, 3**8, size=(120, 120))
    yield "smith_valuations random 120x120 mod 3^8", (M, 3, 8), "smith_valuations"


def det_cases():
    for prm in [(7, 2, 4, 1), (3, 5, 2, 1), (7, 3, 4, 1)]:
        A = np.ascontiguousarray(build_matrix(OrbitMatrixParams(*prm)).entries)
        yield f"det_mod_prime A{prm} ({A.shape[0]}x{A.shape[0]})", (A, 2**31 - 1), "det_mod_prime"


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=loops)) / loops


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    cases = list(skew_cases(rng)) + list(smith_cases(rng)) + list(det_cases())
    print(f"{'kernel':<52} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for label, call_args, name in cases:
        fast = getattr(_kernels, f"{name}_numba")
        slow = getattr(_kernels, f"{name}_numpy")
        r_fast, r_slow = fast(*call_args), slow(*call_args)
        same = sorted(np.asarray(r_fast).ravel().tolist()) == sorted(np.asarray(r_slow).ravel().tolist())
        if not same:
            raise SystemExit(f"kernels disagree on {label}")
        t_fast = best_time(fast, call_args, args.repeat)
        t_slow = best_time(slow, call_args, args.repeat)
        print(f"{label:<52} {t_fast * 1e3:>10.3f}ms {t_slow * 1e3:>10.3f}ms {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
