"""Spectral calculus over dense complex Hermitian operators.

Everything downstream (weight updates, projector splits, typicality windows,
certificates) reduces to eigendecompositions of Hermitian matrices, operator
functions of their spectra, pinching, and semidefinite-order checks with
explicit tolerances. This module owns those primitives.

All values are immutable after construction and all operations are pure, so
concurrent read-only use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, DimensionMismatch, SpectralError

# Construction / decomposition tolerances. The source material for this
# algorithm family never states numerical tolerances; these are artifact
# decisions, pinned here so tests and certificates agree on them.
HERMITICITY_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
PROJECTOR_TOL = 1e-10
RANK_TOL = 1e-10


class HermitianOperator:
    """Dense complex square matrix, symmetrized to Hermitian at construction.

    Symmetrizing A <- (A + A†)/2 (rather than rejecting near-Hermitian input)
    keeps downstream arithmetic closed under floating-point drift.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise DimensionMismatch("dimension must be at least 1")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @classmethod
    def zero(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "HermitianOperator":
        return HermitianOperator(self.matrix * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in descending order with matching orthonormal eigenvectors.

    Exact eigenvalue ties are ordered by the row index of each eigenvector's
    largest-magnitude entry, so degenerate (e.g. diagonal) operators decompose
    reproducibly.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> HermitianOperator:
        v = self.eigenvectors
        return HermitianOperator((v * self.eigenvalues) @ v.conj().T)


class Projector:
    """Idempotent Hermitian operator with its integer rank."""

    __slots__ = ("operator", "rank")

    def __init__(self, operator: HermitianOperator):
        p = operator.matrix
        dev = float(np.max(np.abs(p @ p - p)))
        if dev > PROJECTOR_TOL:
            raise ContractViolation(f"not idempotent: max |P^2 - P| = {dev:.3e} > {PROJECTOR_TOL}")
        tr = float(np.trace(p).real)
        rank = int(round(tr))
        if abs(tr - rank) > 1e-8:
            raise DimensionMismatch(f"projector trace {tr} is not near an integer")
        self.operator = operator
        self.rank = rank

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix

    @classmethod
    def identity(cls, dim: int) -> "Projector":
        return cls(HermitianOperator.identity(dim))

    @classmethod
    def zero(cls, dim: int) -> "Projector":
        return cls(HermitianOperator.zero(dim))

    @classmethod
    def from_basis(cls, columns: np.ndarray) -> "Projector":
        """Projector onto the span of the given orthonormal columns."""
        return cls(HermitianOperator(columns @ columns.conj().T))

    def __repr__(self):
        return f"Projector(dim={self.dim}, rank={self.rank})"


def spectral_decompose(a: HermitianOperator) -> SpectralDecomposition:
    """Eigendecompose, sorted descending with the canonical tie order."""
    try:
        w, v = np.linalg.eigh(a.matrix)
    except np.linalg.LinAlgError as exc:
        scale = float(np.max(np.abs(a.matrix))) if a.dim else 0.0
        raise SpectralError(a.dim, scale) from exc
    anchor = np.argmax(np.abs(v), axis=0)
    order = np.lexsort((anchor, -w))
    w = np.ascontiguousarray(w[order])
    v = np.ascontiguousarray(v[:, order])
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def eigenvalues_ascending(a: HermitianOperator) -> np.ndarray:
    """Eigenvalues only, ascending (the shared solver for norms and traces)."""
    try:
        return np.linalg.eigvalsh(a.matrix)
    except np.linalg.LinAlgError as exc:
        scale = float(np.max(np.abs(a.matrix))) if a.dim else 0.0
        raise SpectralError(a.dim, scale) from exc


def apply_spectral_function(a: HermitianOperator, f: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
    """U f(lambda) U† for a scalar table f applied to the spectrum."""
    sd = spectral_decompose(a)
    vals = np.asarray(f(sd.eigenvalues), dtype=np.float64)
    v = sd.eigenvectors
    return HermitianOperator((v * vals) @ v.conj().T)


def expm_scaled(a: HermitianOperator, c: float) -> HermitianOperator:
    """exp(c·A) through the spectrum."""
    return apply_spectral_function(a, lambda lam: np.exp(c * lam))


def gen_inv_sqrt(a: HermitianOperator, rank_tol: float = RANK_TOL) -> HermitianOperator:
    """Generalized inverse square root: lambda^(-1/2) on the support, 0 elsewhere.

    Eigenvalues count as support when above rank_tol times the largest
    eigenvalue; exact zeros never occur in floating point. The all-zero
    operator maps to the zero operator (a valid generalized inverse).
    """

    def table(lam):
        top = lam[0] if lam.size else 0.0
        keep = lam > rank_tol * top if top > 0 else np.zeros_like(lam, dtype=bool)
        out = np.zeros_like(lam)
        out[keep] = lam[keep] ** -0.5
        return out

    sd = spectral_decompose(a)
    vals = table(sd.eigenvalues)
    v = sd.eigenvectors
    return HermitianOperator((v * vals) @ v.conj().T)


def support_projector(a: HermitianOperator, rank_tol: float = RANK_TOL) -> Projector:
    """Projector onto the span of eigenvectors with eigenvalue > rank_tol·lambda_max."""
    sd = spectral_decompose(a)
    top = sd.eigenvalues[0] if sd.dim else 0.0
    if top <= 0:
        return Projector.zero(a.dim)
    keep = sd.eigenvalues > rank_tol * top
    cols = sd.eigenvectors[:, keep]
    return Projector.from_basis(cols)


def pinch(a: HermitianOperator, p: Projector) -> HermitianOperator:
    """P·A·P."""
    if a.dim != p.dim:
        raise DimensionMismatch(f"operator dim {a.dim} vs projector dim {p.dim}")
    return HermitianOperator(p.matrix @ a.matrix @ p.matrix)


def trace_distance(a: HermitianOperator, b: HermitianOperator) -> float:
    """Half the trace norm of A − B."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} vs {b.dim}")
    lam = eigenvalues_ascending(a - b)
    return float(0.5 * np.sum(np.abs(lam)))


def psd_leq(a: HermitianOperator, b: HermitianOperator, tol: float) -> bool:
    """True iff A <= B in semidefinite order up to tol: lambda_min(B−A) >= −tol."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} vs {b.dim}")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(eigenvalues_ascending(b - a)[0] >= -tol)


def positive_part_trace(a: HermitianOperator) -> float:
    """Sum of the positive eigenvalues (same solver as trace_distance)."""
    lam = eigenvalues_ascending(a)
    return float(np.sum(lam[lam > 0]))


def scalar_dominance_transfer_check(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    a: HermitianOperator,
    domain: tuple[float, float],
) -> bool:
    """Check that pointwise f >= g on the domain transfers to f(A) >= g(A).

    The pointwise dominance is the caller's responsibility; a 1000-point grid
    guards against obvious misuse. The spectrum must lie in the domain (up to
    1e-12 of its scale, values are clamped before evaluating the tables).
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ValueError("empty domain")
    grid = np.linspace(lo, hi, 1000)
    if np.any(np.asarray(f(grid)) < np.asarray(g(grid))):
        raise ValueError("f does not dominate g on the sampled domain")
    lam = eigenvalues_ascending(a)
    slack = 1e-12 * max(1.0, float(np.max(np.abs(lam))))
    if lam[0] < lo - slack or lam[-1] > hi + slack:
        offender = lam[0] if lam[0] < lo - slack else lam[-1]
        raise ValueError(f"eigenvalue {offender!r} escapes domain [{lo}, {hi}]")
    clamped = lambda t: np.clip(t, lo, hi)  # noqa: E731
    fa = apply_spectral_function(a, lambda t: np.asarray(f(clamped(t)), dtype=np.float64))
    ga = apply_spectral_function(a, lambda t: np.asarray(g(clamped(t)), dtype=np.float64))
    return psd_leq(ga, fa, 1e-9)
