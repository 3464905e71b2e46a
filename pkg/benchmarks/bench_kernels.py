"""Timing comparison of the jitted evolution kernels against the numpy
fallback.  The two paths are bitwise-identical by construction, so the only
question is speed.

Run:  python3 benchmarks/bench_kernels.py
Env:  HALFLAB_DISABLE_NUMBA=1 skips the jit column entirely.
"""

import time

import numpy as np

from halflab._kernels import (
    HAVE_NUMBA,
    evolve_half,
    evolve_half_numpy,
    evolve_whole,
    evolve_whole_numpy,
)

CASES = [
    # (label, r, p, p_b, b_row, buffer N, steps)
    ("half r1p1 N=4k n=500", 1, 1, 1, [5.0], 4_000, 500),
    ("half r1p2 N=4k n=500", 1, 2, 2, [1.2, -0.2], 4_000, 500),
    ("half r1p1 N=20k n=2000", 1, 1, 1, [5.0], 20_000, 2_000),
    ("whole r1p2 N=20k n=2000", 1, 2, None, None, 20_000, 2_000),
]

LFR_A = np.array([0.125, 0.25, 0.625])
O3_A = np.array([-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16])


def _best_of(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    rows = []
    for label, r, p, p_b, b_row, N, steps in CASES:
        a = LFR_A if p == 1 else O3_A
        u0 = np.zeros(N)
        u0[N // 4] = 1.0
        if b_row is None:
            np_fn = lambda: evolve_whole_numpy(u0, a, r, p, steps)
            jit_fn = lambda: evolve_whole(u0, a, r, p, steps)
        else:
            b = np.array([b_row])
            np_fn = lambda: evolve_half_numpy(u0, a, b, r, p, p_b, steps)
            jit_fn = lambda: evolve_half(u0, a, b, r, p, p_b, steps)
        t_np, out_np = _best_of(np_fn)
        if HAVE_NUMBA:
            jit_fn()  # compile outside the timed region
            t_jit, out_jit = _best_of(jit_fn)
            same = np.array_equal(out_np, out_jit)
            rows.append((label, t_jit * 1e3, t_np * 1e3, t_np / t_jit, same))
        else:
            rows.append((label, None, t_np * 1e3, None, True))

    header = f"{'case':28s} {'jit ms':>9s} {'numpy ms':>9s} {'speedup':>8s} {'bitwise':>8s}"
    print("numba active" if HAVE_NUMBA else
          "numba disabled (HALFLAB_DISABLE_NUMBA or not installed)")
    print(header)
    print("-" * len(header))
    for label, t_jit, t_np, speed, same in rows:
        jit_s = f"{t_jit:9.2f}" if t_jit is not None else "        -"
        spd_s = f"{speed:7.1f}x" if speed is not None else "       -"
        print(f"{label:28s} {jit_s} {t_np:9.2f} {spd_s} {'yes' if same else 'NO':>8s}")


if __name__ == "__main__":
    main()
