"""Compare the compiled search kernels against the pure-Python fallback.

Usage: python benchmarks/compare_backends.py [--quick]

Times the three hot kernels on representative workloads and prints a table.
The two backends return identical results (asserted here); only the
constant factor differs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lsalloc import _kernels
from lsalloc.instance import uniform_random_instance
from lsalloc.matching import BipartiteMultigraph, edge_color


def _time(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_exact(n, vmax, seed, objective, complete, backend):
    rng = np.random.default_rng(seed)
    inst = uniform_random_instance(n, vmax, rng)
    return _kernels.exact_search(
        inst.values, objective, complete, backend=backend
    )


def bench_fair(n, seed, notion, backend):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 4, size=(n, n))
    values = np.broadcast_to(base, (n, n, n)).copy()
    return _kernels.fair_search(values, notion, symmetry=True, backend=backend)


def bench_color(n, backend):
    edges = [(u, v) for u in range(n) for v in range(n)]
    g = BipartiteMultigraph(n, n, edges)
    return edge_color(g, n, backend=backend)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    if not _kernels.HAVE_COMPILED:
        raise SystemExit("compiled kernels are not built; nothing to compare")

    n_exact = 4 if args.quick else 5
    n_fair = 4
    n_color = 100 if args.quick else 200

    cases = [
        (
            f"exact umax complete n={n_exact}",
            lambda b: bench_exact(n_exact, 9, 7, "umax", True, b),
        ),
        (
            f"exact umax partial  n={n_exact}",
            lambda b: bench_exact(n_exact, 9, 7, "umax", False, b),
        ),
        (
            f"exact emax complete n={n_exact}",
            lambda b: bench_exact(n_exact, 9, 7, "emax", True, b),
        ),
        (
            f"fairness search EQ  n={n_fair}",
            lambda b: bench_fair(n_fair, 11, "EQ", b),
        ),
        (
            f"edge coloring K({n_color},{n_color})",
            lambda b: bench_color(n_color, b),
        ),
    ]

    print(f"{'kernel':34s} {'compiled':>10s} {'pure':>10s} {'speedup':>8s}")
    for name, runner in cases:
        t_c, r_c = _time(lambda: runner("compiled"))
        t_p, r_p = _time(lambda: runner("pure"))
        if isinstance(r_c, tuple):
            assert r_c[0] == r_p[0]
            assert np.array_equal(r_c[1], r_p[1])
        elif r_c is None or r_p is None:
            assert r_c is None and r_p is None
        else:
            assert np.array_equal(np.asarray(r_c), np.asarray(r_p))
        print(f"{name:34s} {t_c * 1e3:9.1f}ms {t_p * 1e3:9.1f}ms {t_p / t_c:7.1f}x")


if __name__ == "__main__":
    main()
