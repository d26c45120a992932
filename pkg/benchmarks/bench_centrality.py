#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-numpy fallbacks.

Runs betweenness, all-pairs BFS stats, and power iteration on two graph
shapes: a sparse random graph (script-like layers) and a chain of cliques
(caption-like layers). Both backends are imported directly, so one process
measures both; the JIT path is warmed before timing.

Usage: python benchmarks/bench_centrality.py [--nodes 1500] [--cliques 60]
"""

import argparse
import random
import time

import numpy as np

from movielayers.accel import _numba_kernels, _numpy_kernels

BACKENDS = [("numba", _numba_kernels), ("numpy", _numpy_kernels)]


def to_csr(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    indptr = np.zeros(n + 1, np.int64)
    for i, lst in enumerate(adj):
        indptr[i + 1] = indptr[i] + len(lst)
    indices = np.array([x for lst in adj for x in sorted(lst)], np.int64)
    return indptr, indices


def sparse_random(n, avg_degree, rng):
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    while len(edges) < n * avg_degree // 2:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return n, sorted(edges)


def clique_chain(cliques, size, rng):
    """Cliques bridged by single edges, like per-scene caption cliques."""
    edges = []
    for c in range(cliques):
        base = c * size
        for i in range(size):
            for j in range(i + 1, size):
                edges.append((base + i, base + j))
        if c:
            edges.append((base - rng.randrange(1, size), base + rng.randrange(size)))
    return cliques * size, edges


def run(kernels, indptr, indices, n):
    timings = {}
    t0 = time.perf_counter()
    bc = kernels.betweenness(indptr, indices, n)
    timings["betweenness"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    kernels.distance_stats(indptr, indices, np.arange(n, dtype=np.int64))
    timings["distance_stats"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    x, _, _ = kernels.power_iteration(indptr, indices, n, 1e-8, 1000)
    timings["power_iteration"] = time.perf_counter() - t0
    return timings, bc, x


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=1500, help="sparse graph size")
    parser.add_argument("--degree", type=int, default=6, help="sparse graph average degree")
    parser.add_argument("--cliques", type=int, default=60, help="number of chained cliques")
    parser.add_argument("--clique-size", type=int, default=25, help="clique size")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    graphs = {
        f"sparse n={args.nodes} deg~{args.degree}": sparse_random(args.nodes, args.degree, rng),
        f"clique-chain {args.cliques}x{args.clique_size}": clique_chain(
            args.cliques, args.clique_size, rng
        ),
    }

    # warm the JIT so compilation is not timed
    wn, wedges = sparse_random(50, 4, rng)
    wi, wx = to_csr(wn, wedges)
    run(_numba_kernels, wi, wx, wn)

    for label, (n, edges) in graphs.items():
        indptr, indices = to_csr(n, edges)
        print(f"\n{label}: {n} nodes, {len(edges)} edges")
        results = {}
        for name, kernels in BACKENDS:
            timings, bc, x = run(kernels, indptr, indices, n)
            results[name] = (timings, bc, x)
            row = "  ".join(f"{k}={v * 1000:8.1f} ms" for k, v in timings.items())
            print(f"  {name:>5}: {row}")
        (_, bc_a, x_a), (_, bc_b, x_b) = results["numba"], results["numpy"]
        agree = np.allclose(bc_a, bc_b, atol=1e-9) and np.allclose(x_a, x_b, atol=1e-9)
        ratios = {
            k: results["numpy"][0][k] / max(results["numba"][0][k], 1e-9)
            for k in results["numba"][0]
        }
        speedup = "  ".join(f"{k} x{v:.1f}" for k, v in ratios.items())
        print(f"  agree={agree}  numpy/numba speedup: {speedup}")


if __name__ == "__main__":
    main()
