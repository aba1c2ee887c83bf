"""Pure-numpy selection loop for the multiplicative-weights codebook builder.

Reference implementation of the hot kernel; resolvon._kernel is the compiled
equivalent. Per round: eigendecompose the accumulated cost, form the Gibbs
density exp(-eps * cost)/Tr (spectrum shifted by its minimum so the
exponential never under/overflows; the shift cancels in the normalization),
take the trace against every candidate cost matrix, and select the first
maximizer. Ties resolve to the lowest index by exact float comparison.
"""

import numpy as np


def select_codebook(edges, eps, rounds):
    """Run the greedy Hedge selection loop.

    Parameters
    ----------
    edges : (X, d, d) complex array of Hermitian cost matrices with 0 <= M <= I.
    eps : learning rate in (0, 1/2).
    rounds : number of selections to make.

    Returns
    -------
    (selected, incurred) : int64[rounds] edge indices and float64[rounds]
    per-round costs Tr(F(l) M(x_l)), with F(l) evaluated before accumulating
    the round's cost matrix.
    """
    edges = np.ascontiguousarray(edges, dtype=np.complex128)
    if edges.ndim != 3 or edges.shape[1] != edges.shape[2]:
        raise ValueError(f"edges must be (X, d, d), got {edges.shape}")
    rounds = int(rounds)
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    d = edges.shape[1]
    cost = np.zeros((d, d), dtype=np.complex128)
    selected = np.empty(rounds, dtype=np.int64)
    incurred = np.empty(rounds, dtype=np.float64)
    for l in range(rounds):
        w, v = np.linalg.eigh(cost)
        g = np.exp(-eps * (w - w[0]))
        f = (v * (g / g.sum())) @ v.conj().T
        t = np.einsum("xij,ji->x", edges, f).real
        j = int(np.argmax(t))
        selected[l] = j
        incurred[l] = t[j]
        cost += edges[j]
    return selected, incurred
