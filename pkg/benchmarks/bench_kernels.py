"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are importable in one process (``kernels.numba_impl`` and
``kernels.numpy_impl``); the env flag only picks which one the library uses.
"""
import argparse
import math
import time

import numpy as np

from nhqfi import _jit, kernels, pt


def best_of(fn, repeat):
    fn()  # warm-up (jit compile / cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def channel_grid(n=64):
    P = pt.PtParams(0.25, 1.0, math.pi / 2)
    H = pt.build(P)
    ms = np.linspace(-3, 3, n)
    phis = 2 * math.pi * np.arange(n) / n
    mm, pp = np.meshgrid(ms, phis, indexing="ij")
    states = pt._eigen_states(P, mm.ravel(), pp.ravel())
    thetas = np.linspace(0, 4 * math.pi / math.sqrt(P.discriminant), n)
    return H, np.repeat(states, n, axis=0), np.tile(thetas, states.shape[0])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    H, psi0s, thetas = channel_grid()
    rng = np.random.default_rng(0)
    A = (rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))) * 0.5
    cases = [
        ("qfi2_batch 64^3", lambda impl: impl.qfi2_batch(H, psi0s, thetas)),
        ("expm2_batch 64^3", lambda impl: impl.expm2_batch(H, thetas)),
        ("expm_series 6x6", lambda impl: impl.expm_series(A)),
    ]
    if not _jit.HAVE_NUMBA:
        print("numba not importable; only the numpy backend is timed")
    print(f"{'kernel':<20s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for name, call in cases:
        t_np = best_of(lambda: call(kernels.numpy_impl), args.repeat)
        if _jit.HAVE_NUMBA:
            t_nb = best_of(lambda: call(kernels.numba_impl), args.repeat)
            a = call(kernels.numpy_impl)
            b = call(kernels.numba_impl)
            same = all(np.allclose(x, y, rtol=1e-10, atol=1e-12, equal_nan=True)
                       for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
            print(f"{name:<20s} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:8.1f}x"
                  + ("" if same else "  MISMATCH"))
        else:
            print(f"{name:<20s} {t_np * 1e3:12.2f} {'-':>12s}")


if __name__ == "__main__":
    main()
