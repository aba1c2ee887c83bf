"""Command-line driver.

Commands
--------
softcover   single-letter soft covering of the channel itself
resolve     block resolvability: fixed type (--type) or general i.i.d. (--iid)
baseline    random-coding comparison (the only seeded command)
verify      run the invariant battery, exit 0 iff everything passes
sweep       resolve over a grid of codebook sizes, with baseline means

Exit codes: 0 success, 1 certificate violation, 2 invalid input / guardrail.
Reports are deterministic: identical channel bytes and flags give identical
output bytes. Seeds are refused on deterministic commands.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import kernel, verify
from .channel import holevo_capacity
from .errors import CertificateError, GuardrailError, ResolvonError
from .report import (
    resolvability_dict,
    certificate_dict,
    sweep_rows_to_csv,
    to_json_text,
    write_text,
)
from .resolve import BlockDistribution, fixed_type_resolve, general_resolve, random_baseline
from .softcover import Hypergraph, SoftCoverParams, build_codebook
from .spec_io import load_channel_spec
from .typeclasses import TypeClass, sequences_of_type

DEFAULT_EPSILON = 0.05
DEFAULT_TAU = 0.1
DEFAULT_TAU0 = 0.05
DEFAULT_SIZES = (16, 64, 256, 1024, 4096)


def _parse_args(argv):
    top = argparse.ArgumentParser(prog="resolvon", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, seeded=False):
        p.add_argument("--channel", required=True, help="channel document path")
        p.add_argument("--n", type=int, help="block length")
        p.add_argument("--type", dest="type_counts", help="type counts a:b:...")
        p.add_argument("--iid", help="i.i.d. input probabilities p0,p1,...")
        p.add_argument("--eps", type=float, help="learning rate in (0, 1/2)")
        p.add_argument("--tau", type=float, help="mixture trace deficit in (0, 1/2)")
        p.add_argument("--tau0", type=float, help="spectral-split budget in (0, 1/2 - tau)")
        p.add_argument("--xi", type=float, help="target accuracy; derives eps/tau/tau0")
        p.add_argument("--kappa", type=float, help="rate slack; reported size hint")
        p.add_argument(
            "--codebook-size", type=int, dest="codebook_size",
            help="override the certified default size (per selected type for --iid runs)",
        )
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if seeded:
            p.add_argument("--seed", type=int, default=2026)
            p.add_argument("--trials", type=int, default=20)
        else:
            p.add_argument("--seed", type=int, help=argparse.SUPPRESS)
            p.add_argument("--trials", type=int, help=argparse.SUPPRESS)
        return p

    common(sub.add_parser("softcover", help="single-letter soft covering"))
    common(sub.add_parser("resolve", help="block resolvability"))
    common(sub.add_parser("baseline", help="random-coding baseline"), seeded=True)
    common(sub.add_parser("verify", help="invariant battery"))
    sweep = common(sub.add_parser("sweep", help="codebook-size sweep"), seeded=True)
    sweep.add_argument("--sizes", help="comma-separated codebook sizes")
    return top.parse_args(argv)


def _accuracy_params(args):
    eps, tau, tau0 = args.eps, args.tau, args.tau0
    if args.xi is not None:
        if args.xi <= 0:
            raise GuardrailError("xi must be positive")
        eps = eps if eps is not None else min(args.xi**2 / 50.0, 0.05)
        tau = tau if tau is not None else min(args.xi**2 / 50.0, 0.05)
        tau0 = tau0 if tau0 is not None else min(args.xi**2 / 100.0, 0.02)
    eps = DEFAULT_EPSILON if eps is None else eps
    tau = DEFAULT_TAU if tau is None else tau
    tau0 = DEFAULT_TAU0 if tau0 is None else tau0
    if not 0.0 < eps < 0.5:
        raise GuardrailError(f"eps must lie in (0, 1/2), got {eps}")
    if not 0.0 < tau < 0.5:
        raise GuardrailError(f"tau must lie in (0, 1/2), got {tau}")
    if not 0.0 < tau0 < 0.5 - tau:
        raise GuardrailError(f"tau0 must lie in (0, 1/2 - tau), got {tau0}")
    return eps, tau, tau0


def _parse_type(args):
    counts = tuple(int(c) for c in args.type_counts.split(":"))
    t = TypeClass.from_counts(counts)
    if args.n is not None and args.n != t.n:
        raise GuardrailError(f"--n {args.n} does not match type counts summing to {t.n}")
    return t


def _parse_iid(args):
    p = tuple(float(v) for v in args.iid.split(","))
    if args.n is None:
        raise GuardrailError("--iid needs --n")
    return BlockDistribution.iid(p, args.n)


def _refuse_seed(args):
    if args.seed is not None or args.trials is not None:
        raise GuardrailError(
            f"--seed/--trials have no effect on the deterministic '{args.command}' "
            "command and are refused"
        )


def _certificate_failures(cert, trace_dist=None, bound=None, bound_asserted=False):
    failures = []
    if cert.min_selection_margin is not None and cert.min_selection_margin < -1e-9:
        failures.append(f"selection margin {cert.min_selection_margin:.3e} below floor")
    if cert.assumptions.get("edge_cap") and not cert.d_max_bound_holds:
        failures.append(f"d_max {cert.d_max:.6f} exceeds its cap {cert.d_max_cap:.6f}")
    if cert.operator_floor_holds is False:
        failures.append("operator floor violated at certified size")
    if bound_asserted and trace_dist is not None and trace_dist > bound + 1e-12:
        failures.append(f"trace distance {trace_dist:.6e} exceeds asserted bound {bound:.6e}")
    return failures


def _emit(doc, args):
    if args.format == "csv":
        if args.command != "sweep":
            raise GuardrailError("csv format is only available for sweep")
        text = sweep_rows_to_csv(doc["results"]["rows"])
    else:
        text = to_json_text(doc)
    if args.out:
        write_text(text, args.out)
    else:
        sys.stdout.write(text)


def _base_doc(command, spec, args, eps, tau, tau0):
    cfg = {
        "epsilon": eps,
        "tau": tau,
        "tau0": tau0,
    }
    if args.n is not None:
        cfg["n"] = args.n
    if args.type_counts:
        cfg["type"] = [int(c) for c in args.type_counts.split(":")]
    if args.iid:
        cfg["iid"] = [float(v) for v in args.iid.split(",")]
    if args.xi is not None:
        cfg["xi_requested"] = args.xi
    if args.kappa is not None:
        cfg["kappa"] = args.kappa
    return {
        "command": command,
        "channel": spec.to_document(),
        "kernel_backend": kernel.default_backend(),
        "config": cfg,
    }


def _cmd_softcover(args, spec):
    _refuse_seed(args)
    eps, tau, tau0 = _accuracy_params(args)
    ch = spec.channel()
    if args.iid:
        p = np.array([float(v) for v in args.iid.split(",")])
        if p.shape != (ch.size,):
            raise GuardrailError(f"--iid needs {ch.size} probabilities")
    else:
        p = np.full(ch.size, 1.0 / ch.size)
    eta = max(float(np.linalg.eigvalsh(ch.states[i])[-1]) for i in range(ch.size))
    params = SoftCoverParams(epsilon=eps, tau=tau, tau0=tau0, eta=min(1.0, eta + 1e-12))
    h = Hypergraph(vertex_dim=ch.dim, labels=ch.alphabet, edges=ch.states, weights=p)
    size = args.codebook_size
    if size is None:
        from .softcover import required_size

        size = required_size(params, ch.dim, mode="covering")
    code, cert = build_codebook(h, params, size)
    doc = _base_doc("softcover", spec, args, eps, tau, tau0)
    doc["config"]["eta"] = params.eta
    doc["config"]["codebook_size"] = size
    doc["results"] = {
        "certificate": certificate_dict(cert),
        "codebook": list(code.entries),
    }
    _emit(doc, args)
    failures = _certificate_failures(
        cert, cert.trace_dist, cert.covering_bound, cert.bound_asserted
    )
    if failures:
        raise CertificateError("; ".join(failures))
    return 0


def _resolve_run(args, spec, eps, tau, tau0):
    ch = spec.channel()
    if args.type_counts:
        t = _parse_type(args)
        return fixed_type_resolve(
            ch, t, epsilon=eps, tau=tau, tau0=tau0, codebook_size=args.codebook_size
        )
    if args.iid:
        dist = _parse_iid(args)
        return general_resolve(
            ch, dist, epsilon=eps, tau=tau, tau0=tau0, per_type_size=args.codebook_size
        )
    raise GuardrailError("resolve needs --type or --iid")


def _cmd_resolve(args, spec):
    _refuse_seed(args)
    eps, tau, tau0 = _accuracy_params(args)
    code, rep = _resolve_run(args, spec, eps, tau, tau0)
    doc = _base_doc("resolve", spec, args, eps, tau, tau0)
    doc["results"] = resolvability_dict(rep, code)
    if args.kappa is not None:
        ch = spec.channel()
        if ch.size <= 4:
            cap, _ = holevo_capacity(ch)
            n = rep.config.get("n", args.n or 1)
            doc["results"]["rate_size_hint"] = math.exp(n * (cap + args.kappa))
            doc["results"]["holevo_capacity"] = cap
    if args.xi is not None:
        doc["results"]["xi_requested"] = args.xi
        doc["results"]["xi_achieved_bound"] = rep.bound
    _emit(doc, args)
    failures = _certificate_failures(
        rep.certificate, rep.trace_dist, rep.bound, rep.bound_asserted
    )
    if failures:
        raise CertificateError("; ".join(failures))
    return 0


def _baseline_distribution(args, ch):
    if args.iid:
        return _parse_iid(args)
    if args.type_counts:
        t = _parse_type(args)
        seqs = sequences_of_type(t, ch.alphabet)
        return BlockDistribution.explicit({s: 1.0 / len(seqs) for s in seqs})
    raise GuardrailError("baseline needs --type or --iid")


def _cmd_baseline(args, spec):
    eps, tau, tau0 = _accuracy_params(args)
    ch = spec.channel()
    if args.codebook_size is None:
        raise GuardrailError("baseline needs --codebook-size")
    dist = _baseline_distribution(args, ch)
    stats = random_baseline(ch, dist, args.codebook_size, args.seed, args.trials)
    doc = _base_doc("baseline", spec, args, eps, tau, tau0)
    doc["config"]["codebook_size"] = args.codebook_size
    doc["config"]["seed"] = stats.seed
    doc["config"]["trials"] = stats.trials
    doc["results"] = {
        "mean": stats.mean,
        "min": stats.min,
        "max": stats.max,
        "values": list(stats.values),
    }
    _emit(doc, args)
    return 0


def _cmd_verify(args, spec):
    _refuse_seed(args)
    ch = spec.channel()
    lines: list[str] = []

    def emit(line):
        lines.append(line)
        print(line)

    ok = verify.run_all(ch, emit=emit)
    if args.out:
        doc = {
            "command": "verify",
            "channel": spec.to_document(),
            "kernel_backend": kernel.default_backend(),
            "results": {"passed": ok, "lines": lines},
        }
        write_text(to_json_text(doc), args.out)
    return 0 if ok else 1


def _cmd_sweep(args, spec):
    eps, tau, tau0 = _accuracy_params(args)
    if not args.type_counts:
        raise GuardrailError("sweep needs --type")
    ch = spec.channel()
    t = _parse_type(args)
    sizes = (
        tuple(int(v) for v in args.sizes.split(",")) if args.sizes else DEFAULT_SIZES
    )
    if any(s < 1 for s in sizes):
        raise GuardrailError("sweep sizes must be positive")
    seqs = sequences_of_type(t, ch.alphabet)
    dist = BlockDistribution.explicit({s: 1.0 / len(seqs) for s in seqs})
    rows = []
    failures: list[str] = []
    for size in sizes:
        code, rep = fixed_type_resolve(
            ch, t, epsilon=eps, tau=tau, tau0=tau0, codebook_size=size
        )
        stats = random_baseline(ch, dist, size, args.seed, args.trials)
        rows.append(
            {
                "L": size,
                "trace_dist": rep.trace_dist,
                "bound": rep.bound,
                "d_max": rep.d_max,
                "required_L": rep.required_size,
                "baseline_mean": stats.mean,
            }
        )
        failures.extend(
            _certificate_failures(rep.certificate, rep.trace_dist, rep.bound, rep.bound_asserted)
        )
    doc = _base_doc("sweep", spec, args, eps, tau, tau0)
    doc["config"]["sizes"] = list(sizes)
    doc["config"]["seed"] = args.seed
    doc["config"]["trials"] = args.trials
    doc["results"] = {"rows": rows}
    _emit(doc, args)
    if failures:
        raise CertificateError("; ".join(failures))
    return 0


_COMMANDS = {
    "softcover": _cmd_softcover,
    "resolve": _cmd_resolve,
    "baseline": _cmd_baseline,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = _parse_args(argv)
    try:
        spec = load_channel_spec(args.channel)
        return _COMMANDS[args.command](args, spec)
    except CertificateError as exc:
        print(f"certificate violation: {exc}", file=sys.stderr)
        return 1
    except (ResolvonError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
