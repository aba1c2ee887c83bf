"""Soft covering of operator-valued hypergraphs by deterministic codebooks.

A hypergraph here is a weighted family of Hermitian edges 0 <= E_x <= I on a
finite-dimensional vertex space. The goal is a small multiset (codebook) of
edge indices whose uniform average E_C approximates the weighted mixture E_p
in trace distance. The builder:

1. splits the spectrum of E_p at tau0/dim into a heavy part Pi1 and a light
   part Pi0 (the light part carries at most tau0 of the trace),
2. forms cost matrices M(x) = (E_p^Pi1)^(-1/2) E_x^Pi1 (E_p^Pi1)^(-1/2) *
   exp(-d_max) on the heavy subspace, where d_max normalizes the family into
   the 0 <= M <= I contract,
3. runs the multiplicative-weights selection loop: each round the greedy
   adversary picks the edge maximizing Tr(F(l) M(x)), ties to lowest index,
4. certifies the run: selection-margin floor, operator floor
   E_C^Pi1 >= (1-2eps) E_p^Pi1 at sufficient size, the d_max cap
   ln(eta dim / tau0), and the end-to-end covering bound
   3 eps + 3 tau + (7/2) tau0 + sqrt(2 eps + tau + tau0).

The whole pipeline is deterministic: identical inputs give identical
codebooks, so every certificate is reproducible from its report.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernel
from .errors import ContractViolation, DimensionMismatch, GuardrailError
from .hermitian import (
    HermitianOperator,
    Projector,
    eigenvalues_ascending,
    pinch,
    spectral_decompose,
    trace_distance,
)

EDGE_CONTRACT_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-12
MARGIN_TOL = 1e-9
OPERATOR_FLOOR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Weighted family of Hermitian edges 0 <= E_x <= I on a vertex space."""

    vertex_dim: int
    labels: tuple
    edges: np.ndarray  # (X, d, d) complex, Hermitian slices
    weights: np.ndarray  # (X,) probabilities

    def __post_init__(self):
        edges = np.ascontiguousarray(self.edges, dtype=np.complex128)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        labels = tuple(self.labels)
        if edges.ndim != 3 or edges.shape[1:] != (self.vertex_dim, self.vertex_dim):
            raise DimensionMismatch(
                f"edges must be (X, {self.vertex_dim}, {self.vertex_dim}), got {edges.shape}"
            )
        if len(labels) != edges.shape[0] or weights.shape != (edges.shape[0],):
            raise DimensionMismatch("labels, edges and weights must agree in length")
        if len(set(labels)) != len(labels):
            raise GuardrailError("edge labels must be distinct")
        if edges.shape[0] < 1:
            raise GuardrailError("hypergraph needs at least one edge")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise GuardrailError("weights must be non-negative and sum to 1")
        sym = np.max(np.abs(edges - edges.conj().transpose(0, 2, 1)))
        if sym > 1e-9:
            raise ContractViolation(f"edges must be Hermitian (max asymmetry {sym:.3e})")
        for x in range(edges.shape[0]):
            lam = np.linalg.eigvalsh(edges[x])
            if lam[0] < -EDGE_CONTRACT_TOL or lam[-1] > 1.0 + EDGE_CONTRACT_TOL:
                raise ContractViolation(
                    f"edge {labels[x]!r} violates 0 <= E <= I: spectrum "
                    f"[{lam[0]:.3e}, {lam[-1]:.17g}]"
                )
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.edges.shape[0]

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GuardrailError(f"unknown edge label {label!r}") from None

    def mixture(self) -> HermitianOperator:
        """E_p = sum_x p(x) E_x."""
        return HermitianOperator(np.einsum("x,xij->ij", self.weights, self.edges))


@dataclass(frozen=True)
class SoftCoverParams:
    """Accuracy knobs: eps (learning rate), tau (mixture trace deficit),
    tau0 (spectral-split budget), eta (edge cap E_x <= eta I)."""

    epsilon: float
    tau: float
    tau0: float
    eta: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise GuardrailError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if not 0.0 < self.tau < 0.5:
            raise GuardrailError(f"tau must lie in (0, 1/2), got {self.tau}")
        if not 0.0 < self.tau0 < 0.5 - self.tau:
            raise GuardrailError(
                f"tau0 must lie in (0, 1/2 - tau) = (0, {0.5 - self.tau}), got {self.tau0}"
            )
        if not self.eta > 0:
            raise GuardrailError(f"eta must be positive, got {self.eta}")


@dataclass(frozen=True, eq=False)
class ProjectorSplit:
    """Spectral split of E_p at threshold tau0/dim.

    pi1 spans eigenvectors with eigenvalue strictly above the threshold; pi0
    is its complement (including the kernel of E_p), so pi1 + pi0 = I. basis
    holds an orthonormal basis of range(pi1) as columns, base_eigenvalues the
    matching eigenvalues of E_p.
    """

    pi1: Projector
    pi0: Projector
    threshold: float
    basis: np.ndarray
    base_eigenvalues: np.ndarray


@dataclass(frozen=True)
class Codebook:
    """Ordered list of edge labels (repetitions allowed)."""

    entries: tuple

    def __post_init__(self):
        if len(self.entries) < 1:
            raise GuardrailError("codebook must be non-empty")

    @property
    def size(self) -> int:
        return len(self.entries)

    def multiplicities(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out[e] = out.get(e, 0) + 1
        return out


@dataclass(frozen=True)
class CoverCertificate:
    """Certified quantities of one soft-covering run.

    covering_bound is 3 eps + 3 tau + (7/2) tau0 + sqrt(2 eps + tau + tau0);
    it is asserted against trace_dist only when the preconditions hold
    (assumptions dict: edge_cap = every E_x <= eta I, mixture_trace =
    Tr(E_p) >= 1 - tau, size = L >= l_required). min_selection_margin is
    min_l Tr(F(l) M(x_l)) - exp(-d_max) (None for externally built
    codebooks); operator_floor_holds checks E_C^Pi1 >= (1-2eps) E_p^Pi1 and
    is None when the run is smaller than the floor's required size.
    """

    d_max: float
    l_used: int
    l_required: int
    trace_dist: float
    covering_bound: float
    operator_floor_holds: Optional[bool]
    min_selection_margin: Optional[float]
    assumptions: dict = field(default_factory=dict)
    bound_asserted: bool = False
    d_max_cap: float = float("nan")
    d_max_bound_holds: bool = False
    terms: dict = field(default_factory=dict)
    vertex_dim: int = 0
    pinched_rank: int = 0
    threshold: float = float("nan")


def split_projectors(h: Hypergraph, tau0: float) -> ProjectorSplit:
    """Split E_p's spectrum at tau0/vertex_dim (ties at the threshold go light)."""
    if not tau0 > 0:
        raise GuardrailError(f"tau0 must be positive, got {tau0}")
    threshold = tau0 / h.vertex_dim
    sd = spectral_decompose(h.mixture())
    keep = sd.eigenvalues > threshold
    basis = np.ascontiguousarray(sd.eigenvectors[:, keep])
    basis.setflags(write=False)
    vals = np.ascontiguousarray(sd.eigenvalues[keep])
    vals.setflags(write=False)
    if basis.shape[1] == 0:
        pi1 = Projector.zero(h.vertex_dim)
    else:
        pi1 = Projector.from_basis(basis)
    pi0 = Projector(HermitianOperator(np.eye(h.vertex_dim) - pi1.matrix))
    return ProjectorSplit(
        pi1=pi1, pi0=pi0, threshold=threshold, basis=basis, base_eigenvalues=vals
    )


def _reduced_cost_stack(h: Hypergraph, split: ProjectorSplit):
    """Cost matrices on the heavy subspace: K_x = R^(-1/2) B† E_x B R^(-1/2),
    M_x = K_x exp(-d_max). Returns (stack (X, s, s), d_max)."""
    b = split.basis
    s = b.shape[1]
    if s == 0:
        raise GuardrailError("degenerate pinched base: no spectrum above the split threshold")
    scale = 1.0 / np.sqrt(split.base_eigenvalues)
    ks = np.empty((h.size, s, s), dtype=np.complex128)
    lam_max = np.empty(h.size)
    for x in range(h.size):
        ex = b.conj().T @ h.edges[x] @ b
        k = (scale[:, None] * ex) * scale[None, :]
        k = (k + k.conj().T) / 2
        ks[x] = k
        lam_max[x] = np.linalg.eigvalsh(k)[-1]
    top = float(lam_max.max())
    if top <= 0:
        raise GuardrailError("degenerate pinched base: all pinched edges vanish")
    d_max = math.log(top)
    ms = ks * math.exp(-d_max)
    for x in range(h.size):
        lam = np.linalg.eigvalsh(ms[x])
        if lam[0] < -EDGE_CONTRACT_TOL or lam[-1] > 1.0 + EDGE_CONTRACT_TOL:
            raise ContractViolation(
                f"cost matrix for edge {h.labels[x]!r} escapes [0, I]: "
                f"spectrum [{lam[0]:.3e}, {lam[-1]:.17g}]"
            )
    return ms, d_max


def compute_cost_family(h: Hypergraph, split: ProjectorSplit):
    """Ambient-space cost family and its normalizer d_max.

    d_max = max_x ln lambda_max((E_p^Pi1)^(-1/2) E_x^Pi1 (E_p^Pi1)^(-1/2));
    every returned M(x) satisfies 0 <= M <= I up to 1e-9.
    """
    ms, d_max = _reduced_cost_stack(h, split)
    b = split.basis
    family = [HermitianOperator(b @ ms[x] @ b.conj().T) for x in range(h.size)]
    return family, d_max


def required_size(
    params: SoftCoverParams,
    vertex_dim: int,
    mode: str = "covering",
    d_max: float | None = None,
) -> int:
    """Codebook size needed for the certificates.

    mode="covering": ceil(eta * dim * ln(dim) / (eps^2 tau0)), the size at
    which the end-to-end covering bound holds. mode="floor": ceil(
    exp(d_max) * ln(dim) / eps^2), the size for the operator floor
    E_C >= (1-2eps) E_p on the pinched space.
    """
    if vertex_dim < 1:
        raise GuardrailError(f"vertex_dim must be positive, got {vertex_dim}")
    if vertex_dim == 1:
        warnings.warn("vertex_dim 1 has ln(dim) = 0; any codebook size suffices")
        return 1
    log_dim = math.log(vertex_dim)
    if mode == "covering":
        value = params.eta * vertex_dim * log_dim / (params.epsilon**2 * params.tau0)
    elif mode == "floor":
        if d_max is None:
            raise GuardrailError("mode='floor' requires d_max")
        log_value = d_max + math.log(log_dim) - 2.0 * math.log(params.epsilon)
        if log_value > 700.0:
            raise GuardrailError("required size overflows a float; instance is out of desk scale")
        value = math.exp(d_max) * log_dim / params.epsilon**2
    else:
        raise GuardrailError(f"unknown required_size mode {mode!r}")
    if not math.isfinite(value):
        raise GuardrailError("required size overflows a float; instance is out of desk scale")
    return max(1, math.ceil(value))


def mixed_edge(h: Hypergraph, c: Codebook) -> HermitianOperator:
    """Uniform average of the codebook's edges, E_C = (1/L) sum_l E_{x_l}."""
    total = np.zeros((h.vertex_dim, h.vertex_dim), dtype=np.complex128)
    for label in c.entries:
        total += h.edges[h.index_of(label)]
    return HermitianOperator(total / c.size)


def certify(
    h: Hypergraph,
    params: SoftCoverParams,
    c: Codebook,
    *,
    min_selection_margin: Optional[float] = None,
) -> CoverCertificate:
    """Evaluate every certified inequality for a codebook against a hypergraph.

    Violated preconditions are reported in `assumptions` (the bound is then
    not asserted), never as a certificate failure.
    """
    split = split_projectors(h, params.tau0)
    _, d_max = _reduced_cost_stack(h, split)

    e_p = h.mixture()
    e_c = mixed_edge(h, c)
    e_p1 = pinch(e_p, split.pi1)
    e_c1 = pinch(e_c, split.pi1)

    edge_cap_max = max(
        float(np.linalg.eigvalsh(h.edges[x])[-1]) for x in range(h.size)
    )
    assumptions = {
        "edge_cap": bool(edge_cap_max <= params.eta + EDGE_CONTRACT_TOL),
        "mixture_trace": bool(e_p.trace() >= 1.0 - params.tau - 1e-9),
    }

    l_required = required_size(params, h.vertex_dim, mode="covering")
    assumptions["size"] = bool(c.size >= l_required)
    bound_asserted = all(assumptions.values())

    dist = trace_distance(e_p, e_c)
    bound = (
        3.0 * params.epsilon
        + 3.0 * params.tau
        + 3.5 * params.tau0
        + math.sqrt(2.0 * params.epsilon + params.tau + params.tau0)
    )

    floor_required = required_size(params, h.vertex_dim, mode="floor", d_max=d_max)
    floor_holds: Optional[bool] = None
    if c.size >= floor_required:
        gap = eigenvalues_ascending(
            e_c1 - (1.0 - 2.0 * params.epsilon) * e_p1
        )[0]
        floor_holds = bool(gap >= -OPERATOR_FLOOR_TOL)

    d_max_cap = math.log(params.eta * h.vertex_dim / params.tau0)

    # Triangle-inequality decomposition of the covering distance, plus the
    # pinched-trace and gentle-measurement intermediates, kept separately so
    # any constant-factor question is visible in the report.
    terms = {
        "light_part": trace_distance(e_p, e_p1),
        "gentle": trace_distance(e_c, e_c1),
        "pinched": trace_distance(e_p1, e_c1),
        "pinched_codebook_trace": e_c1.trace(),
        "pinched_trace_floor": 1.0 - 2.0 * params.epsilon - params.tau - params.tau0,
        "gentle_cap": math.sqrt(2.0 * params.epsilon + params.tau + params.tau0),
    }

    return CoverCertificate(
        d_max=d_max,
        l_used=c.size,
        l_required=l_required,
        trace_dist=dist,
        covering_bound=bound,
        operator_floor_holds=floor_holds,
        min_selection_margin=min_selection_margin,
        assumptions=assumptions,
        bound_asserted=bound_asserted,
        d_max_cap=d_max_cap,
        d_max_bound_holds=bool(d_max <= d_max_cap + MARGIN_TOL),
        terms=terms,
        vertex_dim=h.vertex_dim,
        pinched_rank=split.pi1.rank,
        threshold=split.threshold,
    )


def build_codebook(
    h: Hypergraph,
    params: SoftCoverParams,
    size: int,
    backend: str | None = None,
) -> tuple[Codebook, CoverCertificate]:
    """Deterministically build a codebook of the given size and certify it.

    The selection loop runs on an orthonormal basis of the heavy subspace
    range(Pi1); every cost matrix is supported there, so this matches running
    the weight update on the ambient space with the density restricted and
    renormalized to the subspace.
    """
    if size < 1:
        raise GuardrailError(f"codebook size must be positive, got {size}")
    split = split_projectors(h, params.tau0)
    ms, d_max = _reduced_cost_stack(h, split)
    selected, incurred = kernel.select_codebook(ms, params.epsilon, size, backend=backend)
    margin = float(np.min(incurred) - math.exp(-d_max))
    c = Codebook(entries=tuple(h.labels[int(i)] for i in selected))
    cert = certify(h, params, c, min_selection_margin=margin)
    return c, cert
