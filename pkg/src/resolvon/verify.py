"""Self-contained invariant battery behind the `verify` CLI command.

Each suite re-checks, with fixed seeds, the numerical guarantees the library
is built on: spectral-calculus identities, the operator-exponential
inequalities, the regret certificate of the weight update, the soft-covering
certificates, typicality bounds, the classical (commuting) reduction, and
determinism of the builder. Suites return (ok, detail); the runner prints one
line per suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import mmwu
from .channel import CQChannel, output_mix
from .hermitian import (
    HermitianOperator,
    expm_scaled,
    gen_inv_sqrt,
    pinch,
    positive_part_trace,
    psd_leq,
    support_projector,
    trace_distance,
)
from .resolve import fixed_type_resolve
from .softcover import Hypergraph, SoftCoverParams, build_codebook, required_size
from .typeclasses import TypeClass, sequences_of_type
from .typicality import (
    TypicalitySpec,
    build_edge,
    conditional_mass_floor,
    conditional_typical_projector,
    pinched_eigen_cap,
    typical_projector,
    typical_trace_cap,
)


def _random_hermitian(rng, dim, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2)


def _random_contraction(rng, dim):
    """Random A with 0 <= A <= I."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = g @ g.conj().T
    top = np.linalg.eigvalsh(h)[-1]
    return HermitianOperator(h / (top * (1.0 + rng.uniform(0.05, 1.0))))


def _random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = g @ g.conj().T
    return HermitianOperator(h / np.trace(h).real)


def _random_hypergraph(rng, dim, n_edges, trace_target=None):
    edges = np.empty((n_edges, dim, dim), dtype=np.complex128)
    for x in range(n_edges):
        edges[x] = _random_contraction(rng, dim).matrix
    w = rng.uniform(0.5, 1.5, size=n_edges)
    w /= w.sum()
    if trace_target is not None:
        # pinning every edge's trace pins the mixture trace and keeps each
        # largest eigenvalue at most the target
        for x in range(n_edges):
            edges[x] *= trace_target / float(np.trace(edges[x]).real)
    return Hypergraph(
        vertex_dim=dim,
        labels=tuple(f"e{i}" for i in range(n_edges)),
        edges=edges,
        weights=w,
    )


def suite_spectral_core(channel, rng):
    worst = 0.0
    for _ in range(40):
        dim = int(rng.integers(2, 7))
        a = _random_hermitian(rng, dim)
        b = _random_hermitian(rng, dim)
        c = _random_hermitian(rng, dim)
        worst = max(worst, abs(trace_distance(a, b) - trace_distance(b, a)))
        tri = trace_distance(a, c) - (trace_distance(a, b) + trace_distance(b, c))
        worst = max(worst, tri)
        rho = _random_density(rng, dim)
        sig = _random_density(rng, dim)
        worst = max(worst, abs(positive_part_trace(rho - sig) - trace_distance(rho, sig)))
        psd = _random_contraction(rng, dim)
        sup = support_projector(psd)
        worst = max(worst, float(np.max(np.abs(pinch(psd, sup).matrix - psd.matrix))))
        x = gen_inv_sqrt(psd)
        sandwich = HermitianOperator(x.matrix @ psd.matrix @ x.matrix)
        worst = max(worst, float(np.max(np.abs(sandwich.matrix - sup.matrix))))
    return worst < 1e-9, f"max deviation {worst:.2e}"


def suite_exp_inequalities(channel, rng):
    ok = True
    for _ in range(30):
        dim = int(rng.integers(2, 9))
        a = _random_contraction(rng, dim)
        for eps in (0.05, 0.15, 0.25, 0.35, 0.45):
            eps1 = 1.0 - math.exp(-eps)
            lhs = expm_scaled(a, -eps)
            rhs = HermitianOperator(np.eye(dim) - eps1 * a.matrix)
            ok &= psd_leq(lhs, rhs, 1e-9)
    grid = np.linspace(0.0, 0.5, 10_000)
    ok &= bool(np.all(1.0 - np.exp(-grid) >= grid * (1.0 - grid) - 1e-12))
    gt_worst = -math.inf
    for _ in range(30):
        dim = int(rng.integers(2, 9))
        a = _random_hermitian(rng, dim, 0.7)
        b = _random_hermitian(rng, dim, 0.7)
        lhs = expm_scaled(a + b, 1.0).trace()
        rhs = float(np.trace(expm_scaled(a, 1.0).matrix @ expm_scaled(b, 1.0).matrix).real)
        gt_worst = max(gt_worst, lhs - rhs)
    ok &= gt_worst <= 1e-9
    return ok, f"Golden-Thompson worst slack {gt_worst:.2e}"


def suite_regret(channel, rng):
    worst = math.inf
    for _ in range(40):
        dim = int(rng.integers(2, 7))
        eps = float(rng.choice([0.05, 0.1, 0.2, 0.3, 0.45]))
        rounds = int(rng.integers(3, 40))
        s = mmwu.new_state(eps, dim)
        for _ in range(rounds):
            s = mmwu.step(s, _random_contraction(rng, dim))
        worst = min(worst, mmwu.regret_gap(s))
    return worst >= -1e-8, f"min regret gap {worst:.3e}"


def suite_soft_cover(channel, rng):
    ok = True
    details = []
    for trial in range(4):
        dim = int(rng.integers(2, 5))
        h = _random_hypergraph(rng, dim, int(rng.integers(2, 6)))
        eps = 0.15
        params = SoftCoverParams(epsilon=eps, tau=0.25, tau0=0.1, eta=1.0)
        code, cert = build_codebook(h, params, 400)
        ok &= cert.min_selection_margin >= -1e-9
        ok &= cert.d_max_bound_holds or not cert.assumptions["edge_cap"]
        if cert.operator_floor_holds is not None:
            ok &= cert.operator_floor_holds
    h = _random_hypergraph(rng, 2, 4, trace_target=0.97)
    params = SoftCoverParams(epsilon=0.1, tau=0.05, tau0=0.05, eta=1.0)
    size = required_size(params, 2, mode="covering")
    code, cert = build_codebook(h, params, size)
    ok &= cert.bound_asserted and cert.trace_dist <= cert.covering_bound + 1e-12
    details.append(f"covering d_tr {cert.trace_dist:.3e} <= {cert.covering_bound:.3f}")
    return ok, "; ".join(details)


def suite_typicality(channel, rng):
    ch = channel
    if ch.dim > 3 or ch.size > 4:
        return True, "skipped (channel above desk scale for dense blocks)"
    ok = True
    worst = math.inf
    for n in (1, 2, 3, 4):
        spec = TypicalitySpec(alpha=2.0, n=n)
        mix = output_mix(ch, np.full(ch.size, 1.0 / ch.size))
        proj = typical_projector(mix, spec)
        ok &= proj.rank <= typical_trace_cap(mix, spec) * (1 + 1e-6)
        xn = tuple(ch.alphabet[i % ch.size] for i in range(n))
        cond = conditional_typical_projector(ch, xn, spec)
        w = ch.sequence_state(xn)
        mass = float(np.trace(w.matrix @ cond.matrix).real)
        ok &= mass >= conditional_mass_floor(ch, spec) - 1e-9
        counts = [sum(1 for s in xn if s == sym) for sym in ch.alphabet]
        cap = pinched_eigen_cap(ch, counts, spec)
        pinched = cond.matrix @ w.matrix @ cond.matrix
        ok &= float(np.linalg.eigvalsh(pinched)[-1]) <= cap + 1e-9
        q = build_edge(ch, xn, spec)
        floor = 1.0 - 2.0 * ch.dim * ch.size / spec.alpha**2
        worst = min(worst, q.trace() - floor)
        ok &= q.trace() >= floor - 1e-9
    return ok, f"min edge-trace slack {worst:.3e}"


def suite_classical_reduction(channel, rng):
    diag = all(
        float(np.max(np.abs(channel.states[i] - np.diag(np.diag(channel.states[i]))))) < 1e-14
        for i in range(channel.size)
    )
    if not diag or channel.size != 2:
        return True, "skipped (needs a binary diagonal channel)"
    t = TypeClass.from_counts((2, 2))
    code, rep = fixed_type_resolve(
        channel, t, epsilon=0.1, tau=0.1, tau0=0.05, codebook_size=64, backend="python"
    )
    seqs = sequences_of_type(t, channel.alphabet)
    mix = output_mix(channel, {s: 1.0 / len(seqs) for s in seqs})
    # With commuting states every pipeline operator is diagonal and the trace
    # distance equals the total-variation distance of the diagonals.
    from .resolve import _codebook_state

    w_code = _codebook_state(channel, code.entries)
    off = float(np.max(np.abs(w_code.matrix - np.diag(np.diag(w_code.matrix)))))
    tv = 0.5 * float(np.sum(np.abs(np.diag(mix.matrix - w_code.matrix).real)))
    ok = off < 1e-12 and abs(tv - rep.trace_dist) < 1e-10
    return ok, f"offdiag {off:.1e}, |tv - d_tr| {abs(tv - rep.trace_dist):.1e}"


def suite_determinism(channel, rng):
    h = _random_hypergraph(np.random.default_rng(7), 3, 4)
    params = SoftCoverParams(epsilon=0.1, tau=0.2, tau0=0.1, eta=1.0)
    c1, cert1 = build_codebook(h, params, 300)
    c2, cert2 = build_codebook(h, params, 300)
    ok = c1.entries == c2.entries and cert1.trace_dist == cert2.trace_dist
    ok &= cert1.min_selection_margin == cert2.min_selection_margin
    return ok, "two identical builds produced identical certificates"


SUITES = (
    ("spectral-core", suite_spectral_core),
    ("operator-exponential-inequalities", suite_exp_inequalities),
    ("regret-certificate", suite_regret),
    ("soft-covering-certificates", suite_soft_cover),
    ("typicality-bounds", suite_typicality),
    ("classical-reduction", suite_classical_reduction),
    ("determinism", suite_determinism),
)


def run_all(channel: CQChannel, emit=print) -> bool:
    all_ok = True
    for name, fn in SUITES:
        rng = np.random.default_rng(20260808)
        ok, detail = fn(channel, rng)
        all_ok &= ok
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
