"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--points 200]
"""

import argparse
import time

import numpy as np

from qvoronoi import _kernels_py, kernels
from qvoronoi.bloch import bloch_to_density_batch, sample_sphere
from qvoronoi.qdm import neg_entropy
from qvoronoi.seb import _ball_grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    v = sample_sphere(args.points, "uniform", args.seed) * rng.uniform(0.3, 1.0, (args.points, 1))
    nege = neg_entropy(bloch_to_density_batch(v))
    _, grid = _ball_grid((0, 0, 0), 40, 0.025)  # ~270k centers
    dist = rng.random((200_000, 8))

    impls = {"python": _kernels_py}
    if kernels.BACKEND == "cython":
        from qvoronoi import _kernels

        impls["cython"] = _kernels
    else:
        print("compiled kernels not available; timing the numpy fallback only")

    cases = {
        "qubit_max_divergence": lambda m: kernels.qubit_max_divergence(grid, v, nege, impl=m),
        "qubit_grid_minimax": lambda m: kernels.qubit_grid_minimax(grid, v, nege, impl=m),
        "nearest_two": lambda m: kernels.nearest_two(dist, impl=m),
    }
    print(f"{len(grid)} grid centers, {args.points} points, best of {args.repeat}")
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in impls) + (f"{'speedup':>10}" if len(impls) > 1 else ""))
    for label, fn in cases.items():
        t = {name: best_of(lambda: fn(m), args.repeat) for name, m in impls.items()}
        row = f"{label:<24}" + "".join(f"{t[name] * 1e3:>10.1f}ms" for name in impls)
        if len(impls) > 1:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
