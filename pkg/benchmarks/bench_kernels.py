"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  Both variants are called
directly so a single process can compare them; outputs are checked to agree
before timings are reported.
"""
import argparse
import time

import numpy as np

from dkglab import kernels
from dkglab._accel import USE_NUMBA


def _nullform_args(rng, T, N):
    a = rng.standard_normal((2, T, N, N)) + 1j * rng.standard_normal((2, T, N, N))
    b = rng.standard_normal((2, T, N, N)) + 1j * rng.standard_normal((2, T, N, N))
    k = np.arange(N) - N // 2
    xi = np.stack(np.meshgrid(k, k, indexing="ij"), axis=-1).astype(float)
    norm = np.linalg.norm(xi, axis=-1, keepdims=True)
    u = np.divide(xi, norm, out=np.zeros_like(xi), where=norm > 0)
    amod = np.sqrt(np.abs(a[0]) ** 2 + np.abs(a[1]) ** 2)
    bmod = np.sqrt(np.abs(b[0]) ** 2 + np.abs(b[1]) ** 2)
    return [np.ascontiguousarray(x) for x in (a, b, u, u, amod, bmod)]


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not USE_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")
    rng = np.random.default_rng(args.seed)

    cases = []
    for T, N in [(4, 8), (8, 12), (8, 16)]:
        cases.append((f"nullform_convolution T={T} N={N}", kernels._nullform_conv_numba,
                      kernels._nullform_conv_numpy, _nullform_args(rng, T, N)))
    for n in (64, 256):
        a = (rng.standard_normal((2, 16, n, n)) + 1j * rng.standard_normal((2, 16, n, n))).astype(np.complex64)
        b = (rng.standard_normal((2, 16, n, n)) + 1j * rng.standard_normal((2, 16, n, n))).astype(np.complex64)
        cases.append((f"spinor_pairing 16x{n}x{n} c64", kernels._spinor_pairing_numba,
                      kernels._spinor_pairing_numpy, [a, b]))
    for n in (16, 32):
        f = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        cases.append((f"direct_convolution2 N={n}", kernels._direct_conv2_numba, kernels._direct_conv2_numpy, [f, g]))

    print(f"{'kernel':40s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, fast, slow, fargs in cases:
        fast(*fargs)  # compile
        t_fast, out_fast = best_of(fast, fargs, args.repeat)
        t_slow, out_slow = best_of(slow, fargs, args.repeat)
        out_fast = out_fast if isinstance(out_fast, tuple) else (out_fast,)
        out_slow = out_slow if isinstance(out_slow, tuple) else (out_slow,)
        for x, y in zip(out_fast, out_slow):
            x = np.reshape(x, np.shape(y))
            assert np.allclose(x, y, rtol=1e-4, atol=1e-4 * np.abs(y).max()), name
        print(f"{name:40s} {t_fast:11.4g} {t_slow:11.4g} {t_slow / t_fast:8.2f}")


if __name__ == "__main__":
    main()
