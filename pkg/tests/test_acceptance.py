"""Acceptance suite: every certified guarantee at its stated tolerance.

One test per criterion; each prints a pass line with the measured extremes
(visible with `pytest -s` or `-rP`). Criteria and tolerances:

 1. regret certificate over 200 random cost sequences, slack 1e-8, < 30 s
 2. operator-exponential inequalities (semidefinite cap at 1e-9, scalar grid,
    trace product inequality on 100 pairs), < 20 s
 3. selection margin >= -1e-9 on every codebook build in this suite
 4. operator floor at certified size on 50 random hypergraphs, slack 1e-8
 5. cost-normalizer cap d_max <= ln(eta dim / tau0) + 1e-9 on certified runs
 6. end-to-end covering bound on 20 assumption-satisfying hypergraphs, < 5 min
 7. typicality suite (trace cap, mass floors, eigenvalue cap, edge-trace
    floor) for qubit channels, n = 1..8, slack 1e-9, < 2 min
 8. classical reduction: operator pipeline == scalar pipeline bit-for-bit
    (codebooks symbol-identical, distances within 1e-10)
 9. brute-force sanity at sizes 1..3 over three orthogonal outputs
10. convergence trend: trace distance at L=4096 at most half of L=16, < 5 min
11. byte-identical reports for repeated identical commands
12. random-coding baseline mean over 20 seeds present in the sweep report
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from resolvon import (
    CQChannel,
    HermitianOperator,
    Hypergraph,
    SoftCoverParams,
    TypeClass,
    TypicalitySpec,
    brute_force_oracle,
    build_codebook,
    build_edge,
    classical_embed,
    conditional_typical_projector,
    expm_scaled,
    fixed_type_resolve,
    mixed_edge,
    new_state,
    output_mix,
    pinch,
    psd_leq,
    pure_state_channel,
    required_size,
    sequences_of_type,
    split_projectors,
    step,
    typical_projector,
)
from resolvon.cli import main as cli_main
from resolvon.hermitian import eigenvalues_ascending
from resolvon.typicality import (
    conditional_mass_floor,
    pinched_eigen_cap,
    typical_trace_cap,
)
from helpers import random_contraction, random_hermitian, random_hypergraph
from scalar_pipeline import scalar_fixed_type

KET0 = [1.0, 0.0]
PLUS = [2**-0.5, 2**-0.5]

PURE_DOC = json.dumps(
    {"name": "pure-pair", "builtin": {"kind": "pure_bloch", "angles": [0.0, 1.5707963267948966]}}
)


def report_line(label, detail):
    print(f"PASS  {label}: {detail}")


def test_criterion_01_regret_certificate():
    t0 = time.time()
    rng = np.random.default_rng(101)
    eps_grid = (0.05, 0.1, 0.2, 0.3, 0.45)
    worst = math.inf
    for i in range(200):
        dim = int(rng.integers(2, 9))
        eps = eps_grid[i % len(eps_grid)]
        rounds = int(rng.integers(1, 101))
        s = new_state(eps, dim)
        for _ in range(rounds):
            s = step(s, random_contraction(rng, dim))
        lam_min = float(eigenvalues_ascending(s.cost_sum)[0])
        slack = lam_min + math.log(dim) / eps - (1 - eps) * sum(s.incurred)
        worst = min(worst, slack)
        assert (1 - eps) * sum(s.incurred) <= lam_min + math.log(dim) / eps + 1e-8
    elapsed = time.time() - t0
    assert elapsed < 30.0
    report_line(
        "regret certificate (200 sequences)",
        f"min slack {worst:.3e} >= -1e-8, {elapsed:.1f}s",
    )


def test_criterion_02_operator_exponential_inequalities():
    t0 = time.time()
    rng = np.random.default_rng(102)
    eps_grid = np.linspace(0.05, 0.45, 9)
    for _ in range(100):
        dim = int(rng.integers(2, 9))
        a = random_contraction(rng, dim)
        for eps in eps_grid:
            eps1 = 1.0 - math.exp(-eps)
            cap = HermitianOperator(np.eye(dim) - eps1 * a.matrix)
            assert psd_leq(expm_scaled(a, -eps), cap, 1e-9)
    grid = np.linspace(0.0, 0.5, 10_000)
    assert np.all(1.0 - np.exp(-grid) >= grid * (1.0 - grid) - 1e-15)
    gt_worst = -math.inf
    for _ in range(100):
        dim = int(rng.integers(2, 9))
        a = random_hermitian(rng, dim, 0.8)
        b = random_hermitian(rng, dim, 0.8)
        lhs = expm_scaled(a + b, 1.0).trace()
        rhs = float(np.trace(expm_scaled(a, 1.0).matrix @ expm_scaled(b, 1.0).matrix).real)
        gt_worst = max(gt_worst, lhs - rhs)
        assert lhs <= rhs + 1e-9
    elapsed = time.time() - t0
    assert elapsed < 20.0
    report_line(
        "operator-exponential inequalities",
        f"worst trace-product slack {gt_worst:.3e}, {elapsed:.1f}s",
    )


def test_criterion_03_selection_margin_floor():
    rng = np.random.default_rng(103)
    margins = []
    # random hypergraphs
    for _ in range(10):
        h = random_hypergraph(rng, int(rng.integers(2, 6)), int(rng.integers(2, 6)))
        params = SoftCoverParams(epsilon=0.1, tau=0.2, tau0=0.1, eta=1.0)
        _, cert = build_codebook(h, params, 200)
        margins.append(cert.min_selection_margin)
    # classical diagonal
    edges = np.zeros((3, 3, 3), dtype=np.complex128)
    for i in range(3):
        edges[i, i, i] = 1.0
    h = Hypergraph(vertex_dim=3, labels=("0", "1", "2"), edges=edges,
                   weights=np.array([0.5, 0.25, 0.25]))
    _, cert = build_codebook(h, SoftCoverParams(epsilon=0.1, tau=0.1, tau0=0.05, eta=1.0), 512)
    margins.append(cert.min_selection_margin)
    # block pipeline
    ch = pure_state_channel([KET0, PLUS], alphabet=("0", "+"))
    for size in (16, 128):
        _, rep = fixed_type_resolve(
            ch, TypeClass.from_counts((2, 2)), epsilon=0.05, tau=0.1, tau0=0.05,
            codebook_size=size,
        )
        margins.append(rep.certificate.min_selection_margin)
    assert all(m >= -1e-9 for m in margins)
    report_line(
        "selection-margin floor",
        f"{len(margins)} builds, min margin {min(margins):.3e} >= -1e-9",
    )


def test_criterion_04_operator_floor_at_certified_size():
    t0 = time.time()
    rng = np.random.default_rng(104)
    worst = math.inf
    sizes = []
    for i in range(50):
        eps = (0.1, 0.2)[i % 2]
        dim = int(rng.integers(2, 7))
        h = random_hypergraph(rng, dim, int(rng.integers(2, 7)))
        params = SoftCoverParams(epsilon=eps, tau=0.2, tau0=0.1, eta=1.0)
        split = split_projectors(h, params.tau0)
        from resolvon.softcover import _reduced_cost_stack

        _, d_max = _reduced_cost_stack(h, split)
        size = required_size(params, dim, mode="floor", d_max=d_max)
        sizes.append(size)
        code, cert = build_codebook(h, params, size)
        assert cert.min_selection_margin >= -1e-9
        e_p1 = pinch(h.mixture(), split.pi1)
        e_c1 = pinch(mixed_edge(h, code), split.pi1)
        gap = float(eigenvalues_ascending(e_c1 - (1 - 2 * eps) * e_p1)[0])
        worst = min(worst, gap)
        assert gap >= -1e-8
    elapsed = time.time() - t0
    assert elapsed < 180.0
    report_line(
        "operator floor at certified size (50 hypergraphs)",
        f"min floor gap {worst:.3e} >= -1e-8, sizes {min(sizes)}..{max(sizes)}, {elapsed:.1f}s",
    )


def test_criterion_05_cost_normalizer_cap():
    rng = np.random.default_rng(105)
    worst = -math.inf
    for _ in range(20):
        dim = int(rng.integers(2, 7))
        h = random_hypergraph(rng, dim, int(rng.integers(2, 7)))
        eta = max(float(eigenvalues_ascending(HermitianOperator(e))[-1]) for e in h.edges)
        params = SoftCoverParams(epsilon=0.1, tau=0.2, tau0=0.1, eta=eta)
        _, cert = build_codebook(h, params, 50)
        assert cert.assumptions["edge_cap"]
        assert cert.d_max <= cert.d_max_cap + 1e-9
        assert cert.d_max_bound_holds
        worst = max(worst, cert.d_max - cert.d_max_cap)
    report_line(
        "cost-normalizer cap (20 certified runs)",
        f"max d_max excess over cap {worst:.3e} <= 1e-9",
    )


def test_criterion_06_covering_bound_end_to_end():
    t0 = time.time()
    rng = np.random.default_rng(106)
    eps = tau = tau0 = 0.05
    worst_gap = math.inf
    total_rounds = 0
    for i in range(20):
        dim = 2 if i % 2 == 0 else 3
        h = random_hypergraph(rng, dim, int(rng.integers(3, 6)),
                              mixture_trace=float(rng.uniform(0.96, 0.995)))
        eta = max(float(eigenvalues_ascending(HermitianOperator(e))[-1]) for e in h.edges)
        params = SoftCoverParams(epsilon=eps, tau=tau, tau0=tau0, eta=eta)
        size = required_size(params, dim, mode="covering")
        total_rounds += size
        code, cert = build_codebook(h, params, size)
        assert cert.bound_asserted, cert.assumptions
        assert cert.trace_dist <= cert.covering_bound + 1e-12
        assert cert.min_selection_margin >= -1e-9
        worst_gap = min(worst_gap, cert.covering_bound - cert.trace_dist)
    elapsed = time.time() - t0
    assert elapsed < 300.0
    report_line(
        "covering bound end-to-end (20 hypergraphs)",
        f"min bound slack {worst_gap:.4f}, {total_rounds} total rounds, {elapsed:.1f}s",
    )


def test_criterion_07_typicality_suite():
    t0 = time.time()
    rng = np.random.default_rng(107)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    hmat = g @ g.conj().T
    channels = (
        classical_embed([[0.8, 0.2], [0.2, 0.8]]),
        pure_state_channel([KET0, PLUS], alphabet=("0", "1")),
        CQChannel(("0", "1"), [hmat / np.trace(hmat).real, np.diag([0.7, 0.3]).astype(complex)]),
    )
    alphas = (1.0, 2.0, 4.0, math.sqrt(2.0 * 2 * 2 / 0.1))
    checks = 0
    for ch, n, alpha in itertools.product(channels, range(1, 9), alphas):
        spec = TypicalitySpec(alpha=alpha, n=n)
        counts = (n - n // 2, n // 2)
        t = TypeClass.from_counts(counts)
        mix = output_mix(ch, np.array(counts) / n)
        # trace cap for the mixture's typical projector, plain and widened
        for a2 in (alpha, alpha * math.sqrt(2)):
            p = typical_projector(mix, TypicalitySpec(alpha=a2, n=n))
            cap = typical_trace_cap(mix, TypicalitySpec(alpha=a2, n=n))
            assert p.rank <= cap * (1 + 1e-6) + 1e-9
            checks += 1
        seqs = sequences_of_type(t, ch.alphabet)
        mix_proj = typical_projector(mix, TypicalitySpec(alpha=alpha * math.sqrt(2), n=n))
        eta = pinched_eigen_cap(ch, counts, spec)
        for xn in {seqs[0], seqs[-1]}:
            w = ch.sequence_state(xn)
            cond = conditional_typical_projector(ch, xn, spec)
            mass = float(np.trace(w.matrix @ cond.matrix).real)
            assert mass >= conditional_mass_floor(ch, spec) - 1e-9
            pinched = cond.matrix @ w.matrix @ cond.matrix
            assert float(np.linalg.eigvalsh(pinched)[-1]) <= eta * (1 + 1e-9) + 1e-12
            capture = float(np.trace(w.matrix @ mix_proj.matrix).real)
            assert capture >= 1.0 - 2 * 2 / alpha**2 - 1e-9
            q = build_edge(ch, xn, spec)
            assert q.trace() >= 1.0 - 2 * 2 * 2 / alpha**2 - 1e-9
            lam = eigenvalues_ascending(q)
            assert lam[0] >= -1e-9 and lam[-1] <= 1.0 + 1e-9
            checks += 5
    elapsed = time.time() - t0
    assert elapsed < 120.0
    report_line(
        "typicality suite",
        f"{checks} bound checks over 3 channels, n=1..8, 4 window widths, {elapsed:.1f}s",
    )


def test_criterion_08_classical_reduction_lockstep():
    rows = [[0.8, 0.2], [0.2, 0.8]]
    ch = classical_embed(rows)
    t = TypeClass.from_counts((2, 2))
    size = 64
    code, rep = fixed_type_resolve(
        ch, t, epsilon=0.1, tau=0.1, tau0=0.05, codebook_size=size, backend="python"
    )
    picks, tv, d_max = scalar_fixed_type(rows, (2, 2), 0.1, 0.1, 0.05, size)
    assert tuple(picks) == code.entries, "codebooks must match symbol-for-symbol"
    assert rep.d_max == d_max
    assert abs(rep.trace_dist - tv) <= 1e-10
    assert rep.certificate.min_selection_margin >= -1e-9
    report_line(
        "classical reduction lockstep",
        f"codebooks identical over {size} rounds, |d_tr - tv| = {abs(rep.trace_dist - tv):.2e}",
    )


def test_criterion_09_brute_force_sanity():
    ch = classical_embed(np.eye(3))
    p = {"0": 1 / 3, "1": 1 / 3, "2": 1 / 3}
    edges = np.stack([ch.state(s).matrix for s in ch.alphabet])
    h = Hypergraph(vertex_dim=3, labels=ch.alphabet, edges=edges,
                   weights=np.full(3, 1 / 3))
    params = SoftCoverParams(epsilon=0.1, tau=0.1, tau0=0.05, eta=1.0)
    gaps = []
    for size in (1, 2, 3):
        code, cert = build_codebook(h, params, size)
        _, best = brute_force_oracle(ch, p, size)
        assert cert.trace_dist >= best - 1e-12
        gaps.append(cert.trace_dist - best)
        if size == 3:
            assert cert.trace_dist <= 1e-10 and best <= 1e-10
    report_line(
        "brute-force sanity (sizes 1..3)",
        f"greedy-minus-optimal gaps {['%.2e' % g for g in gaps]}, exact cover at size 3",
    )


SWEEP_SIZES = (16, 64, 256, 1024, 4096)


@pytest.fixture(scope="module")
def sweep_report(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sweep")
    channel_path = tmp / "pure.json"
    channel_path.write_text(PURE_DOC)
    out = tmp / "sweep.json"
    code = cli_main(
        [
            "sweep", "--channel", str(channel_path), "--type", "2:2",
            "--sizes", ",".join(str(s) for s in SWEEP_SIZES),
            "--eps", "0.05", "--tau", "0.1", "--tau0", "0.05",
            "--seed", "2026", "--trials", "20", "--out", str(out),
        ]
    )
    assert code == 0
    return json.loads(out.read_text())


def test_criterion_10_convergence_trend(sweep_report):
    t0 = time.time()
    rows = sweep_report["results"]["rows"]
    by_size = {row["L"]: row for row in rows}
    assert set(by_size) == set(SWEEP_SIZES)
    first = by_size[16]["trace_dist"]
    last = by_size[4096]["trace_dist"]
    assert last <= first / 2.0
    assert time.time() - t0 < 300.0
    report_line(
        "convergence trend",
        f"d_tr {first:.5f} @ L=16 -> {last:.6f} @ L=4096 (ratio {last / first:.4f} <= 0.5)",
    )


def test_criterion_11_deterministic_reports(tmp_path):
    channel_path = tmp_path / "pure.json"
    channel_path.write_text(PURE_DOC)
    argsets = (
        ["resolve", "--channel", str(channel_path), "--type", "2:2",
         "--codebook-size", "128"],
        ["softcover", "--channel", str(channel_path), "--codebook-size", "64"],
        ["sweep", "--channel", str(channel_path), "--type", "2:2",
         "--sizes", "16,64", "--trials", "3"],
    )
    for i, argv in enumerate(argsets):
        a = tmp_path / f"run_a{i}.json"
        b = tmp_path / f"run_b{i}.json"
        assert cli_main(argv + ["--out", str(a)]) == 0
        assert cli_main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    report_line("deterministic reports", "resolve/softcover/sweep byte-identical on repeat")


def test_criterion_12_baseline_mean_reported(sweep_report):
    rows = sweep_report["results"]["rows"]
    assert sweep_report["config"]["trials"] == 20
    for row in rows:
        assert "baseline_mean" in row
        assert math.isfinite(row["baseline_mean"])
        assert row["baseline_mean"] >= 0.0
    means = {row["L"]: row["baseline_mean"] for row in rows}
    report_line(
        "baseline comparison emitted",
        f"20-seed baseline means per size: { {k: round(v, 5) for k, v in means.items()} }",
    )
