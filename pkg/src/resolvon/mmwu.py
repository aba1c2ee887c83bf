"""Matrix multiplicative weights (Hedge) engine with a regret certificate.

The engine plays the online game: at each round the current density
F(l) = exp(-eps * sum of past costs) / Tr(...) pays Tr(F(l) M(x_l)) against
the round's cost matrix, which must satisfy 0 <= M <= I. The weight matrix is
never stored; the density is recomputed from the accumulated cost via one
spectral decomposition per round, which is mathematically identical and keeps
the error bounded by a single eigensolve regardless of the horizon.

The regret guarantee certified here: for every unit vector psi,

    (1 - eps) * sum_l Tr(F(l) M_l)  <=  <psi| sum_l M_l |psi> + ln(dim)/eps,

whose binding comparator is the bottom eigenvector of the accumulated cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, GuardrailError
from .hermitian import HermitianOperator, eigenvalues_ascending, spectral_decompose

COST_CONTRACT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MmwuState:
    """Value-type engine state after `round` completed rounds.

    cost_sum accumulates the selected cost matrices; incurred holds the
    per-round costs Tr(F(l) M(x_l)) at full precision, so the regret gap can
    be evaluated exactly as certified.
    """

    epsilon: float
    dim: int
    round: int
    cost_sum: HermitianOperator
    incurred: tuple[float, ...]


def new_state(epsilon: float, dim: int) -> MmwuState:
    """Fresh state; the round-1 density is the maximally mixed I/dim."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 0.5:
        raise GuardrailError(f"epsilon must lie strictly in (0, 1/2), got {epsilon}")
    if int(dim) < 1:
        raise GuardrailError(f"dim must be positive, got {dim}")
    return MmwuState(
        epsilon=epsilon,
        dim=int(dim),
        round=0,
        cost_sum=HermitianOperator.zero(int(dim)),
        incurred=(),
    )


def density_of(s: MmwuState) -> HermitianOperator:
    """exp(-eps * cost_sum) normalized to unit trace.

    The spectrum is shifted by its minimum before exponentiating; the shift
    cancels in the normalization and prevents under/overflow on long runs.
    """
    sd = spectral_decompose(s.cost_sum)
    w = sd.eigenvalues
    g = np.exp(-s.epsilon * (w - w[-1]))  # w descending; w[-1] is the minimum
    g /= g.sum()
    v = sd.eigenvectors
    return HermitianOperator((v * g) @ v.conj().T)


def _check_cost_contract(m: HermitianOperator, dim: int) -> None:
    if m.dim != dim:
        raise ContractViolation(f"cost matrix dim {m.dim} does not match state dim {dim}")
    lam = eigenvalues_ascending(m)
    if lam[0] < -COST_CONTRACT_TOL:
        raise ContractViolation(f"cost matrix not PSD: eigenvalue {lam[0]:.3e}")
    if lam[-1] > 1.0 + COST_CONTRACT_TOL:
        raise ContractViolation(f"cost matrix exceeds identity: eigenvalue {lam[-1]:.17g}")


def step(s: MmwuState, m: HermitianOperator) -> MmwuState:
    """Play one round: pay Tr(F(l) M) with the pre-update density, then accumulate M."""
    _check_cost_contract(m, s.dim)
    f = density_of(s)
    paid = float(np.trace(f.matrix @ m.matrix).real)
    return MmwuState(
        epsilon=s.epsilon,
        dim=s.dim,
        round=s.round + 1,
        cost_sum=s.cost_sum + m,
        incurred=s.incurred + (paid,),
    )


def regret_gap(s: MmwuState) -> float:
    """lambda_min(cost_sum) + ln(dim)/eps − (1−eps)·(total incurred).

    Non-negative up to numerics: the bottom eigenvector is the best fixed
    pure strategy in hindsight, and the guarantee caps the engine's excess
    over it at ln(dim)/eps after the (1−eps) discount.
    """
    if s.round < 1:
        raise GuardrailError("regret gap is undefined before the first round")
    lam_min = float(eigenvalues_ascending(s.cost_sum)[0])
    return lam_min + math.log(s.dim) / s.epsilon - (1.0 - s.epsilon) * sum(s.incurred)


def run_sequence(epsilon: float, costs) -> MmwuState:
    """Feed a whole cost sequence through the engine (convenience for tests)."""
    costs = list(costs)
    if not costs:
        raise GuardrailError("empty cost sequence")
    s = new_state(epsilon, costs[0].dim)
    for m in costs:
        s = step(s, m)
    return s
