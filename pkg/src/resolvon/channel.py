"""Classical-quantum channels and their entropic quantities.

A channel maps each symbol of a finite alphabet to a density operator on a
shared output space. Block inputs act by tensor products (stationary
memoryless). Dense work is capped at DENSE_DIM_LIMIT ambient dimensions;
larger requests error out rather than thrash.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ContractViolation, DimensionMismatch, GuardrailError
from .hermitian import HermitianOperator, eigenvalues_ascending

DENSITY_TOL = 1e-10
DENSE_DIM_LIMIT = 4096


class CQChannel:
    """Finite alphabet mapped to density operators on a shared output space."""

    __slots__ = ("alphabet", "states")

    def __init__(self, alphabet, states):
        alphabet = tuple(alphabet)
        if len(alphabet) < 1:
            raise GuardrailError("alphabet must be non-empty")
        if len(set(alphabet)) != len(alphabet):
            raise GuardrailError("alphabet symbols must be distinct")
        mats = []
        for sym in alphabet:
            raw = states[sym] if isinstance(states, dict) else states[alphabet.index(sym)]
            m = raw.matrix if isinstance(raw, HermitianOperator) else np.asarray(raw, dtype=np.complex128)
            mats.append(m)
        dims = {m.shape for m in mats}
        if len(dims) != 1 or mats[0].ndim != 2 or mats[0].shape[0] != mats[0].shape[1]:
            raise DimensionMismatch(f"states must share one square shape, got {sorted(dims)}")
        stack = np.ascontiguousarray(np.stack(mats), dtype=np.complex128)
        for sym, m in zip(alphabet, stack):
            asym = float(np.max(np.abs(m - m.conj().T)))
            if asym > 1e-9:
                raise ContractViolation(f"state for {sym!r} is not Hermitian (asymmetry {asym:.3e})")
            lam = np.linalg.eigvalsh(m)
            if lam[0] < -DENSITY_TOL:
                raise ContractViolation(f"state for {sym!r} is not PSD: eigenvalue {lam[0]:.3e}")
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > DENSITY_TOL:
                raise ContractViolation(f"state for {sym!r} has trace {tr:.12f}, expected 1")
        stack.setflags(write=False)
        self.alphabet = alphabet
        self.states = stack

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def index_of(self, symbol) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise GuardrailError(f"symbol {symbol!r} is not in the alphabet") from None

    def state(self, symbol) -> HermitianOperator:
        return HermitianOperator(self.states[self.index_of(symbol)])

    def sequence_state(self, seq) -> HermitianOperator:
        """Tensor-product state of a symbol sequence (memoryless blocks)."""
        seq = tuple(seq)
        if len(seq) < 1:
            raise GuardrailError("sequence must be non-empty")
        if self.dim ** len(seq) > DENSE_DIM_LIMIT:
            raise GuardrailError(
                f"ambient dimension {self.dim}^{len(seq)} exceeds the dense limit {DENSE_DIM_LIMIT}"
            )
        out = self.states[self.index_of(seq[0])]
        for sym in seq[1:]:
            out = np.kron(out, self.states[self.index_of(sym)])
        return HermitianOperator(out)


def classical_embed(rows) -> CQChannel:
    """Embed a row-stochastic matrix as diagonal output states, symbols "0","1",..."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise DimensionMismatch("stochastic matrix must be 2-D")
    states = [np.diag(r.astype(np.complex128)) for r in rows]
    return CQChannel(tuple(str(i) for i in range(rows.shape[0])), states)


def pure_state_channel(vectors, alphabet=None) -> CQChannel:
    """Channel whose outputs are the pure states |v><v| of the given unit vectors."""
    mats = []
    for v in vectors:
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        mats.append(np.outer(v, v.conj()))
    if alphabet is None:
        alphabet = tuple(str(i) for i in range(len(mats)))
    return CQChannel(alphabet, mats)


def _distribution_items(ch: CQChannel, dist):
    if isinstance(dist, dict):
        items = list(dist.items())
    else:
        p = np.asarray(dist, dtype=np.float64)
        if p.shape != (ch.size,):
            raise DimensionMismatch(
                f"probability vector length {p.shape} does not match alphabet size {ch.size}"
            )
        items = list(zip(ch.alphabet, p))
    total = float(sum(float(p) for _, p in items))
    if abs(total - 1.0) > 1e-12 or any(float(p) < 0 for _, p in items):
        raise GuardrailError(f"probabilities must be non-negative and sum to 1, got {total}")
    return items


def output_mix(ch: CQChannel, dist) -> HermitianOperator:
    """Mixture state sum_x p(x) W_x; keys may be symbols or symbol sequences."""
    items = _distribution_items(ch, dist)
    out = None
    for key, p in items:
        w = ch.sequence_state(key) if isinstance(key, tuple) else ch.state(key)
        term = float(p) * w.matrix
        out = term if out is None else out + term
    return HermitianOperator(out)


def von_neumann_entropy(rho: HermitianOperator) -> float:
    """-sum lambda ln lambda over the support, in nats."""
    lam = eigenvalues_ascending(rho)
    top = float(lam[-1])
    if top <= 0:
        return 0.0
    keep = lam > 1e-12 * top
    lam = lam[keep]
    return float(-np.sum(lam * np.log(lam)))


def holevo_information(ch: CQChannel, p) -> float:
    """H(W_p) - sum_x p(x) H(W_x)."""
    items = _distribution_items(ch, p)
    mix = output_mix(ch, dict(items))
    cond = sum(float(pp) * von_neumann_entropy(HermitianOperator(ch.states[ch.index_of(sym)]))
               for sym, pp in items)
    return von_neumann_entropy(mix) - cond


def _simplex_grid(k: int, resolution: int):
    for counts in itertools.combinations_with_replacement(range(k), resolution):
        vec = np.zeros(k)
        for c in counts:
            vec[c] += 1.0
        yield vec / resolution


def holevo_capacity(ch: CQChannel, grid_resolution: int = 20) -> tuple[float, np.ndarray]:
    """Maximize the Holevo information over input distributions.

    Simplex grid search at the given resolution followed by pairwise
    coordinate ascent (ternary search on mass transfers, valid because the
    objective is concave in p). Intended for rate reporting at small
    alphabets; |X| <= 4 enforced.
    """
    k = ch.size
    if k > 4:
        raise GuardrailError("grid search supports |X| <= 4; supply a distribution instead")
    if grid_resolution < 1:
        raise GuardrailError("grid_resolution must be positive")
    entropies = np.array([
        von_neumann_entropy(HermitianOperator(ch.states[i])) for i in range(k)
    ])

    def objective(p):
        mix = np.einsum("x,xij->ij", p, ch.states)
        return von_neumann_entropy(HermitianOperator(mix)) - float(p @ entropies)

    best_p = np.full(k, 1.0 / k)
    best_v = objective(best_p)
    for p in _simplex_grid(k, grid_resolution):
        v = objective(p)
        if v > best_v:
            best_v, best_p = v, p

    p = best_p.copy()
    for _ in range(200):
        improved = 0.0
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                lo, hi = -p[j], p[i]
                if hi - lo < 1e-15:
                    continue
                for _ in range(70):
                    m1 = lo + (hi - lo) / 3
                    m2 = hi - (hi - lo) / 3
                    q1, q2 = p.copy(), p.copy()
                    q1[i] -= m1
                    q1[j] += m1
                    q2[i] -= m2
                    q2[j] += m2
                    if objective(q1) < objective(q2):
                        lo = m1
                    else:
                        hi = m2
                t = (lo + hi) / 2
                q = p.copy()
                q[i] -= t
                q[j] += t
                q = np.clip(q, 0.0, None)
                q /= q.sum()
                v = objective(q)
                if v > best_v:
                    improved += v - best_v
                    best_v, p = v, q
        if improved < 1e-11:
            break
    return best_v, p


def holevo_information_for_type(ch: CQChannel, counts) -> float:
    """Holevo information of the empirical distribution counts/n."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n <= 0:
        raise GuardrailError("type counts must sum to a positive block length")
    return holevo_information(ch, counts / n)

