"""Time the split sweep under the numba and numpy backends.

    python3 benchmarks/bench_sweep.py --sizes 200 2000 20000 --features 3 10
"""
import argparse
import timeit

import numpy as np

from faircart import _kernels
from faircart.fairmetrics import normal_quantile


def problem(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    s = rng.integers(0, 2, n)
    y = (rng.random(n) < 1 / (1 + np.exp(-X[:, 0] - s))).astype(np.int64)
    return X, y, s, np.arange(n, dtype=np.int64)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 2000, 20000])
    ap.add_argument("--features", type=int, nargs="+", default=[3, 10])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {"numpy": _kernels.sweep_numpy}
    if _kernels.HAS_NUMBA:
        backends["numba"] = _kernels.sweep_numba
    z = normal_quantile(0.05)
    print(f"{'n':>7} {'p':>3} " + " ".join(f"{b + ' ms':>11}" for b in backends) + "  same")
    for n in args.sizes:
        for p in args.features:
            X, y, s, rows = problem(n, p, args.seed)
            call = {b: (lambda f=f: f(X, y, s, rows, z, 0.1, True, 5)) for b, f in backends.items()}
            tables = {b: c() for b, c in call.items()}  # also warms the jit
            ms = {b: 1e3 * min(timeit.repeat(c, number=1, repeat=args.repeat)) for b, c in call.items()}
            ref = tables["numpy"]
            same = all(all(np.array_equal(u, v) for u, v in zip(ref, t)) for t in tables.values())
            print(f"{n:>7} {p:>3} " + " ".join(f"{ms[b]:>11.2f}" for b in backends) + f"  {same}")


if __name__ == "__main__":
    main()
