"""Shared random-instance generators for the test suite (all seeded)."""

import numpy as np

from resolvon import HermitianOperator, Hypergraph


def random_hermitian(rng, dim, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2)


def random_contraction(rng, dim, top=None):
    """Random A with 0 <= A <= I; top caps the largest eigenvalue."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = g @ g.conj().T
    lam = np.linalg.eigvalsh(h)[-1]
    cap = top if top is not None else rng.uniform(0.5, 1.0)
    return HermitianOperator(h * (cap / lam))


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = g @ g.conj().T
    return HermitianOperator(h / np.trace(h).real)


def random_hypergraph(rng, dim, n_edges, mixture_trace=None):
    """Random hypergraph; mixture_trace scales every edge to that trace, which
    pins Tr(E_p) while keeping each largest eigenvalue below 1."""
    edges = np.stack([random_contraction(rng, dim).matrix for _ in range(n_edges)])
    w = rng.uniform(0.5, 1.5, size=n_edges)
    w /= w.sum()
    if mixture_trace is not None:
        for x in range(n_edges):
            edges[x] *= mixture_trace / float(np.trace(edges[x]).real)
    return Hypergraph(
        vertex_dim=dim,
        labels=tuple(f"e{i}" for i in range(n_edges)),
        edges=edges,
        weights=w,
    )
