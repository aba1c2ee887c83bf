"""Machine-readable reports: JSON with fixed key order and 17-significant-digit
floats (so every value round-trips exactly), and CSV for size sweeps.

Reports carry no timestamps; identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict

from .errors import GuardrailError

SWEEP_CSV_HEADER = "L,trace_dist,bound,d_max,required_L,baseline_mean"


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _emit(value, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (k, v) in enumerate(items):
            out.append(f'{pad}  {json.dumps(str(k))}: ')
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif value is None:
        out.append("null")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise GuardrailError(f"cannot serialize {type(value).__name__} in a report")


def to_json_text(doc: dict) -> str:
    """Serialize with insertion-ordered keys and exact float formatting."""
    out: list = []
    _emit(doc, 0, out)
    out.append("\n")
    return "".join(out)


def sweep_rows_to_csv(rows) -> str:
    """CSV for sweep results; one row per grid point, header always present."""
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(int(row["L"])),
                    format_float(float(row["trace_dist"])),
                    format_float(float(row["bound"])),
                    format_float(float(row["d_max"])),
                    str(int(row["required_L"])),
                    format_float(float(row["baseline_mean"])),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_text(text: str, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise GuardrailError(f"cannot write report to {path}: {exc}") from None


def certificate_dict(cert) -> dict:
    """CoverCertificate as an ordered plain dict."""
    d = asdict(cert)
    keys = [
        "d_max",
        "d_max_cap",
        "d_max_bound_holds",
        "l_used",
        "l_required",
        "trace_dist",
        "covering_bound",
        "bound_asserted",
        "operator_floor_holds",
        "min_selection_margin",
        "assumptions",
        "terms",
        "vertex_dim",
        "pinched_rank",
        "threshold",
    ]
    return {k: d[k] for k in keys}


def resolvability_dict(report, codebook=None) -> dict:
    """ResolvabilityReport as an ordered plain dict (codebook optional)."""
    out = {
        "trace_dist": report.trace_dist,
        "bound": report.bound,
        "bound_asserted": report.bound_asserted,
        "codebook_size": report.codebook_size,
        "required_size": report.required_size,
        "required_size_literal": report.required_size_literal,
        "holevo_info": report.holevo_info,
        "d_max": report.d_max,
        "terms": dict(report.terms),
        "config": dict(report.config),
        "certificate": certificate_dict(report.certificate),
    }
    if report.baseline_trace_dist is not None:
        out["baseline_trace_dist"] = report.baseline_trace_dist
    if codebook is not None:
        out["codebook"] = [
            list(e) if isinstance(e, tuple) else e for e in codebook.entries
        ]
    return out
