"""Benchmark the codebook-selection kernels (compiled vs pure numpy).

Usage: python benchmarks/bench_kernel.py [--rounds 2000]

Times the full selection loop on representative instance shapes and prints
per-round costs and the speedup. Both backends run the same instances; the
selected codebooks are compared as a sanity check (they can differ only on
exactly tied traces, which the random instances here do not produce).
"""

import argparse
import time

import numpy as np

from resolvon import kernel


def random_instance(rng, n_edges, dim):
    edges = np.empty((n_edges, dim, dim), dtype=np.complex128)
    for x in range(n_edges):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = g @ g.conj().T
        edges[x] = h / (np.linalg.eigvalsh(h)[-1] * 1.25)
    return edges


def time_backend(backend, edges, rounds, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = kernel.select_codebook(edges, 0.1, rounds, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rounds", type=int, default=2000)
    args = parser.parse_args()

    backends = kernel.available_backends()
    print(f"available backends: {', '.join(backends)}  (default: {kernel.default_backend()})")
    if "compiled" not in backends:
        print("compiled kernel not built; benchmarking python backend only")

    rng = np.random.default_rng(42)
    shapes = [(4, 2), (6, 6), (8, 16), (8, 48)]
    header = f"{'edges':>6} {'dim':>4} {'rounds':>7}"
    for b in backends:
        header += f" {b + ' s':>12}"
    if len(backends) == 2:
        header += f" {'speedup':>9} {'codebooks':>10}"
    print(header)
    for n_edges, dim in shapes:
        edges = random_instance(rng, n_edges, dim)
        row = f"{n_edges:>6} {dim:>4} {args.rounds:>7}"
        times = {}
        results = {}
        for b in backends:
            times[b], results[b] = time_backend(b, edges, args.rounds)
            row += f" {times[b]:>12.4f}"
        if len(backends) == 2:
            agree = np.array_equal(results["python"][0], results["compiled"][0])
            row += f" {times['python'] / times['compiled']:>8.1f}x {'match' if agree else 'DIFFER':>10}"
        print(row)


if __name__ == "__main__":
    main()
