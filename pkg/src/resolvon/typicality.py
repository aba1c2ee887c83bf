"""Frequency-typical projectors for block states, and the sandwiched edges.

The typical projector of a state rho at block length n keeps the product
eigenvectors whose per-eigenvalue occupation counts N(j) stay inside the
variance-scaled window |N(j) - n r_j| <= alpha * sqrt(n r_j (1 - r_j));
eigenvalues below the relative rank tolerance are excluded outright (their
window forces N(j) = 0). This construction commutes with rho^{tensor n},
captures all but dim/alpha^2 of the block state's mass per symbol group, and
its trace is at most exp(n H(rho) + (1/e) dim alpha sqrt(n)).

The conditional variant applies, for each symbol, the same window in that
symbol's output eigenbasis across the positions carrying the symbol, then
reassembles in position order.

An edge for the covering step sandwiches the block state between its
conditional typical projector and the mixture's typical projector
(widened by sqrt(|X|)):

    Q(x^n) = P_mix · P_cond(x^n) · W_{x^n} · P_cond(x^n) · P_mix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DENSE_DIM_LIMIT, CQChannel, output_mix, von_neumann_entropy
from .errors import ContractViolation, GuardrailError
from .hermitian import RANK_TOL, HermitianOperator, Projector, spectral_decompose

Q_TRACE_TOL = 1e-9


@dataclass(frozen=True)
class TypicalitySpec:
    """Window width alpha (> 0) and block length n (>= 1)."""

    alpha: float
    n: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise GuardrailError(f"alpha must be positive, got {self.alpha}")
        if self.n < 1:
            raise GuardrailError(f"block length must be positive, got {self.n}")


def _safe_exp(x: float) -> float:
    """exp that saturates to inf instead of raising; the results are upper
    bounds, and an infinite cap is still a valid cap."""
    return math.inf if x > 700.0 else math.exp(x)


def alpha_for_mass_deficit(ch: CQChannel, tau: float) -> float:
    """alpha = sqrt(2 dim |X| / tau): the sandwiched edges then keep
    trace >= 1 - tau."""
    if not tau > 0:
        raise GuardrailError(f"tau must be positive, got {tau}")
    return math.sqrt(2.0 * ch.dim * ch.size / tau)


def _check_block_dim(dim: int, n: int) -> int:
    total = dim**n
    if total > DENSE_DIM_LIMIT:
        raise GuardrailError(
            f"ambient dimension {dim}^{n} = {total} exceeds the dense limit {DENSE_DIM_LIMIT}"
        )
    return total


def _digit_table(dim: int, n: int) -> np.ndarray:
    """(dim^n, n) array of per-position digits in base dim, position 0 leftmost."""
    total = dim**n
    idx = np.arange(total)
    digits = np.empty((total, n), dtype=np.int64)
    for t in range(n):
        digits[:, t] = (idx // dim ** (n - 1 - t)) % dim
    return digits


def _window_mask(digits: np.ndarray, eigs: np.ndarray, block: float, alpha: float) -> np.ndarray:
    """Mask of rows whose digit counts sit inside every eigenvalue's window."""
    dim = eigs.shape[0]
    mask = np.ones(digits.shape[0], dtype=bool)
    for j in range(dim):
        counts = np.sum(digits == j, axis=1)
        r = eigs[j]
        width = alpha * math.sqrt(block * r * (1.0 - r)) if 0.0 < r < 1.0 else 0.0
        mask &= np.abs(counts - block * r) <= width
    return mask


def _clipped_spectrum(eigs: np.ndarray) -> np.ndarray:
    top = float(eigs[0]) if eigs.size else 0.0
    if top <= 0:
        raise GuardrailError("cannot build a typical projector for the zero state")
    out = np.where(eigs > RANK_TOL * top, eigs, 0.0)
    return np.clip(out, 0.0, 1.0)


def typical_basis(rho: HermitianOperator, spec: TypicalitySpec) -> np.ndarray:
    """Orthonormal basis (columns) of the typical subspace of rho^{tensor n}."""
    _check_block_dim(rho.dim, spec.n)
    sd = spectral_decompose(rho)
    eigs = _clipped_spectrum(sd.eigenvalues)
    digits = _digit_table(rho.dim, spec.n)
    mask = _window_mask(digits, eigs, float(spec.n), spec.alpha)
    u_block = sd.eigenvectors
    for _ in range(spec.n - 1):
        u_block = np.kron(u_block, sd.eigenvectors)
    return np.ascontiguousarray(u_block[:, mask])


def typical_projector(rho: HermitianOperator, spec: TypicalitySpec) -> Projector:
    """Projector onto the typical subspace of rho^{tensor n}."""
    basis = typical_basis(rho, spec)
    if basis.shape[1] == 0:
        return Projector.zero(rho.dim**spec.n)
    return Projector.from_basis(basis)


def typical_trace_cap(rho: HermitianOperator, spec: TypicalitySpec) -> float:
    """exp(n H(rho) + (1/e) dim alpha sqrt(n)), the typical projector's trace cap."""
    h = von_neumann_entropy(rho)
    return _safe_exp(spec.n * h + rho.dim * spec.alpha * math.sqrt(spec.n) / math.e)


def conditional_typical_projector(ch: CQChannel, xn, spec: TypicalitySpec) -> Projector:
    """Per-symbol typical windows assembled across the positions of each symbol."""
    xn = tuple(xn)
    if len(xn) != spec.n:
        raise GuardrailError(f"sequence length {len(xn)} does not match block length {spec.n}")
    _check_block_dim(ch.dim, spec.n)
    decomps = {sym: spectral_decompose(ch.state(sym)) for sym in set(xn)}
    digits = _digit_table(ch.dim, spec.n)
    mask = np.ones(digits.shape[0], dtype=bool)
    for sym, sd in decomps.items():
        positions = [t for t, s in enumerate(xn) if s == sym]
        eigs = _clipped_spectrum(sd.eigenvalues)
        mask &= _window_mask(digits[:, positions], eigs, float(len(positions)), spec.alpha)
    u_block = decomps[xn[0]].eigenvectors
    for sym in xn[1:]:
        u_block = np.kron(u_block, decomps[sym].eigenvectors)
    cols = u_block[:, mask]
    if cols.shape[1] == 0:
        return Projector.zero(ch.dim**spec.n)
    return Projector.from_basis(cols)


def conditional_mass_floor(ch: CQChannel, spec: TypicalitySpec) -> float:
    """1 - dim |X| / alpha^2: guaranteed mass under the conditional projector."""
    return 1.0 - ch.dim * ch.size / spec.alpha**2


def conditional_entropy(ch: CQChannel, counts) -> float:
    """Entropy of the outputs conditioned on the empirical input type, in nats."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    return float(
        sum(
            (counts[i] / n) * von_neumann_entropy(HermitianOperator(ch.states[i]))
            for i in range(ch.size)
            if counts[i] > 0
        )
    )


def pinched_eigen_cap(ch: CQChannel, counts, spec: TypicalitySpec) -> float:
    """exp(-n H(W|T) + (1/e) dim |X| alpha sqrt(n)): cap on the pinched block
    state's largest eigenvalue, and the edge-cap eta for the covering step."""
    h_cond = conditional_entropy(ch, counts)
    slack = ch.dim * ch.size * spec.alpha * math.sqrt(spec.n) / math.e
    return _safe_exp(-spec.n * h_cond + slack)


def build_edge(ch: CQChannel, xn, spec: TypicalitySpec) -> HermitianOperator:
    """Sandwiched block state Q(x^n); trace stays >= 1 - 2 dim |X| / alpha^2."""
    xn = tuple(xn)
    counts = [sum(1 for s in xn if s == sym) for sym in ch.alphabet]
    mix = output_mix(ch, {sym: c / len(xn) for sym, c in zip(ch.alphabet, counts) if c > 0})
    mix_proj = typical_projector(mix, TypicalitySpec(alpha=spec.alpha * math.sqrt(ch.size), n=spec.n))
    cond_proj = conditional_typical_projector(ch, xn, spec)
    w = ch.sequence_state(xn)
    inner = cond_proj.matrix @ w.matrix @ cond_proj.matrix
    q = HermitianOperator(mix_proj.matrix @ inner @ mix_proj.matrix)
    floor = 1.0 - 2.0 * ch.dim * ch.size / spec.alpha**2
    if q.trace() < floor - Q_TRACE_TOL:
        raise ContractViolation(
            f"sandwiched edge trace {q.trace():.12f} fell below its floor {floor:.12f}"
        )
    return q
