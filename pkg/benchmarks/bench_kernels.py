#!/usr/bin/env python3
"""Head-to-head timing of the numba kernels against the pure-numpy builds.

Run:  python benchmarks/bench_kernels.py [--repeat N]

The package-level switch is the PUFEC_PURE_NUMPY environment variable; this
script ignores the switch and times both builds directly, then times the
full two-stage decoder through whichever path is active.
"""

import argparse
import time

import numpy as np

from pufec import codes, concat, kernels
from pufec._accel import NUMBA_ENABLED


def timeit(fn, args, repeat, warmup=2):
    for _ in range(warmup):
        fn(*[a.copy() if isinstance(a, np.ndarray) else a for a in args])
    best = float("inf")
    for _ in range(repeat):
        fresh = [a.copy() if isinstance(a, np.ndarray) else a for a in args]
        t0 = time.perf_counter()
        fn(*fresh)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"numba available and active: {NUMBA_ENABLED}")
    rows = []

    # stage-1 workload: 128 rows against the 32-word inner codebook
    cb = codes.rm_code(1, 4).codebook()
    words = rng.integers(0, 1 << 16, size=(128, 1)).astype(np.uint64)
    rows.append(("nearest_codeword 128x32", words.nbytes,
                 timeit(kernels.nearest_codeword_np, (words, cb.packed), args.repeat),
                 timeit(kernels.nearest_codeword_nb, (words, cb.packed), args.repeat)))

    # label-GMD workload: 264 length-128 transforms
    signs = rng.choice(np.array([-1, 1], dtype=np.int32), size=(264, 128))
    rows.append(("rm1_corr_decode 264x128", signs.nbytes,
                 timeit(kernels.rm1_corr_decode_np, (signs,), args.repeat),
                 timeit(kernels.rm1_corr_decode_nb, (signs,), args.repeat)))

    # element-GMD workload: 8 majority-logic decodes of RM(4,7)
    c47 = codes.rm_code(4, 7)
    plan = codes._reed_plan(c47)
    wds = rng.integers(0, 2, size=(8, 128)).astype(np.uint8)
    rows.append(("reed_decode_batch 8xRM(4,7)", wds.nbytes,
                 timeit(kernels.reed_decode_batch_np, (wds, *plan), args.repeat),
                 timeit(kernels.reed_decode_batch_nb, (wds, *plan), args.repeat)))

    print(f"{'kernel':<30} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, _, tnp, tnb in rows:
        print(f"{name:<30} {tnp * 1e6:>10.1f}us {tnb * 1e6:>10.1f}us {tnp / tnb:>8.1f}x")

    # end-to-end decode through the active dispatch
    spec = concat.puf_gcc_2048()
    info = rng.integers(0, 2, spec.k, dtype=np.uint8)
    cw = concat.gc_encode(spec, info)
    noisy = cw.copy()
    for j in range(spec.n_outer):
        noisy[j, rng.choice(spec.n_inner, 3, replace=False)] ^= 1
    concat.gc_decode(spec, noisy)
    t0 = time.perf_counter()
    n = 200
    for _ in range(n):
        concat.gc_decode(spec, noisy)
    per = (time.perf_counter() - t0) / n
    path = "numba" if NUMBA_ENABLED else "numpy"
    print(f"\ngc_decode(2048,131), 3 errors/row, {path} path: {per * 1e3:.2f} ms/decode")


if __name__ == "__main__":
    main()
