"""Compare the Cython kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Prints the median wall time per call for each backend and the speed-up.
Outputs of the two backends are checked for agreement before timing.
"""
import argparse
import statistics
import time

import numpy as np

from kappanorm import _pykernels

try:
    from kappanorm import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    cloud = rng.standard_normal((2000, 2))
    P = _pykernels.convex_hull_2d(rng.standard_normal((400, 2)))
    Q = _pykernels.convex_hull_2d(rng.standard_normal((400, 2)) * [2.0, 0.5])
    X = rng.uniform(-3, 3, 2)
    n = 60
    src, dst = rng.integers(0, n, 6 * n), rng.integers(0, n, 6 * n)
    w = rng.uniform(0.0, 3.0, 6 * n)
    return {
        "convex_hull_2d (2000 pts)": lambda K: K.convex_hull_2d(cloud),
        "minkowski_sum_2d": lambda K: K.minkowski_sum_2d(P, Q),
        "directed_hausdorff_2d": lambda K: K.directed_hausdorff_2d(P, Q),
        "point_polygon_distance": lambda K: K.point_polygon_distance(X, P),
        "bellman_ford (60 nodes)": lambda K: K.bellman_ford(n, src, dst, w),
    }


def _time(fn, repeat):
    fn()  # warm-up
    runs = []
    for _ in range(repeat):
        loops, t0 = 0, time.perf_counter()
        while True:
            fn()
            loops += 1
            el = time.perf_counter() - t0
            if el > 0.05:
                break
        runs.append(el / loops)
    return statistics.median(runs)


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the NumPy fallback is available")
    cases = _cases(np.random.default_rng(args.seed))
    print(f"{'kernel':28s} {'python':>12s} {'cython':>12s} {'speed-up':>9s}")
    for name, call in cases.items():
        t_py = _time(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:28s} {t_py * 1e6:10.1f}us {'-':>12s} {'-':>9s}")
            continue
        if not _same(call(_pykernels), call(_ckernels)):
            raise SystemExit(f"backends disagree on {name}")
        t_c = _time(lambda: call(_ckernels), args.repeat)
        print(f"{name:28s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
