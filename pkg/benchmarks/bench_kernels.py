"""Time the numba kernels against the numpy/scipy fallback.

    python benchmarks/bench_kernels.py [--sizes 500,2000,8000] [--repeat 3]

Graphs are random sparse symmetric matrices with mean degree about 8; the
Ward benchmark clusters random unit vectors.  Each numba kernel is called once
before timing so compilation is excluded.  Results of both backends are
checked for agreement before anything is reported.
"""

import argparse
import time

import numpy as np

from emopattern import _kernels
from emopattern.categorize import AdjacencyMatrix
from emopattern.embclust import cosine_ward_distances


def sparse_graph(rng, n, degree=8):
    m = n * degree // 2
    src = rng.integers(n, size=m)
    dst = rng.integers(n, size=m)
    keep = src != dst
    # a chain keeps the graph connected
    chain = np.arange(n - 1)
    a = np.concatenate([src[keep], chain])
    b = np.concatenate([dst[keep], chain + 1])
    return AdjacencyMatrix._from_pairs(list(range(n)), np.concatenate([a, b]), np.concatenate([b, a]))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(name, size, run, repeat, same):
    run("numba")  # compile
    t_nb, a = best_of(lambda: run("numba"), repeat)
    t_np, b = best_of(lambda: run("numpy"), repeat)
    if not same(a, b):
        raise SystemExit(f"{name} n={size}: backends disagree")
    print(f"{name:<12}{size:>8}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,2000,8000")
    ap.add_argument("--ward-sizes", default="200,800")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<12}{'n':>8}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in map(int, args.sizes.split(",")):
        m = sparse_graph(rng, n)
        bench("power_iter", n, lambda b: _kernels.power_iteration(m.indptr, m.indices, backend=b)[0],
              args.repeat, lambda a, b: np.allclose(a, b, atol=1e-8))
        bench("triangles", n, lambda b: _kernels.triangle_counts(m.indptr, m.indices, backend=b),
              args.repeat, lambda a, b: all((x == y).all() for x, y in zip(a, b)))
    for n in map(int, args.ward_sizes.split(",")):
        d = cosine_ward_distances(rng.normal(size=(n, 32)))
        k = max(1, n // 4)
        bench("ward", n, lambda b: _kernels.ward_agglomerate(d, k, backend=b)[0],
              args.repeat, lambda a, b: (a == b).all())


if __name__ == "__main__":
    main()
