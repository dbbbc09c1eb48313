"""Compare the compiled and numpy reduction kernels.

Run:  python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from isacrelay import _mi_numpy

try:
    from isacrelay import _fastmi
except ImportError:
    _fastmi = None


def bench(fn, args, repeats=200):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"{'case':<28}{'numpy':>12}{'cython':>12}{'speedup':>10}")
    for shape in [(16, 8, 8), (64, 16, 16), (256, 32, 32), (1024, 16, 64)]:
        p = rng.dirichlet(np.ones(np.prod(shape))).reshape(shape)
        cases = [("entropy " + str(shape), "entropy_bits", (p,)),
                 ("cond_mi " + str(shape), "cond_mi_bits", (p,))]
        for label, fname, args in cases:
            t_np = bench(getattr(_mi_numpy, fname), args)
            if _fastmi is None:
                print(f"{label:<28}{t_np * 1e6:>10.1f}us{'n/a':>12}{'':>10}")
                continue
            t_cy = bench(getattr(_fastmi, fname), args)
            a = getattr(_mi_numpy, fname)(*args)
            b = getattr(_fastmi, fname)(*args)
            assert abs(a - b) < 1e-12, (label, a, b)
            print(f"{label:<28}{t_np * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us"
                  f"{t_np / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
