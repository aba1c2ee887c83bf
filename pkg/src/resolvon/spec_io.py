"""Channel documents: a JSON-shaped text format for channel definitions.

Explicit form: output_dim plus a list of [symbol, matrix] pairs, complex
entries written as [re, im]. Builtin generators (pure_bloch, classical_embed,
depolarizing_pair) are kept symbolic in the canonical form; builtin and
explicit states are mutually exclusive. Parsing validates against the channel
invariants and names the offending field on failure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import CQChannel
from .errors import ChannelSpecError

_BUILTIN_KINDS = ("pure_bloch", "classical_embed", "depolarizing_pair")


@dataclass(frozen=True)
class ChannelSpec:
    """Validated channel document; materialize with .channel()."""

    name: str
    output_dim: int
    symbols: tuple
    builtin: Optional[dict] = None
    matrices: Optional[tuple] = None  # tuple of (dim, dim) complex ndarrays

    def channel(self) -> CQChannel:
        if self.builtin is not None:
            return _builtin_channel(self.builtin)
        return CQChannel(self.symbols, list(self.matrices))

    def to_document(self) -> dict:
        doc: dict = {"name": self.name, "output_dim": self.output_dim}
        if self.builtin is not None:
            doc["builtin"] = dict(self.builtin)
        else:
            doc["states"] = [
                [sym, _matrix_to_pairs(m)] for sym, m in zip(self.symbols, self.matrices)
            ]
        return doc

    def to_text(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=False) + "\n"


def _matrix_to_pairs(m: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _pairs_to_matrix(rows, path: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ChannelSpecError(path, "matrix must be a non-empty list of rows")
    dim = len(rows)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ChannelSpecError(f"{path}[{i}]", f"expected a row of {dim} entries")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) for v in entry)
            ):
                raise ChannelSpecError(f"{path}[{i}][{j}]", "entries must be [re, im] pairs")
            out[i, j] = complex(entry[0], entry[1])
    return out


def _builtin_channel(builtin: dict) -> CQChannel:
    kind = builtin["kind"]
    if kind == "classical_embed":
        rows = np.asarray(builtin["stochastic"], dtype=np.float64)
        states = [np.diag(r.astype(np.complex128)) for r in rows]
        return CQChannel(tuple(str(i) for i in range(rows.shape[0])), states)
    if kind == "pure_bloch":
        states = []
        for theta in builtin["angles"]:
            v = np.array([math.cos(theta / 2), math.sin(theta / 2)], dtype=np.complex128)
            states.append(np.outer(v, v.conj()))
        return CQChannel(tuple(str(i) for i in range(len(states))), states)
    if kind == "depolarizing_pair":
        lam = float(builtin["lam"])
        eye = np.eye(2, dtype=np.complex128)
        states = [
            (1 - lam) * np.diag([1.0 + 0j, 0.0]) + lam * eye / 2,
            (1 - lam) * np.diag([0.0, 1.0 + 0j]) + lam * eye / 2,
        ]
        return CQChannel(("0", "1"), states)
    raise ChannelSpecError("builtin.kind", f"unknown kind {kind!r}")


def _validate_builtin(builtin, path: str) -> dict:
    if not isinstance(builtin, dict) or "kind" not in builtin:
        raise ChannelSpecError(path, "builtin must be an object with a 'kind'")
    kind = builtin["kind"]
    if kind not in _BUILTIN_KINDS:
        raise ChannelSpecError(f"{path}.kind", f"must be one of {_BUILTIN_KINDS}, got {kind!r}")
    if kind == "classical_embed":
        rows = builtin.get("stochastic")
        if not isinstance(rows, list) or not rows:
            raise ChannelSpecError(f"{path}.stochastic", "must be a non-empty matrix")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != width:
                raise ChannelSpecError(f"{path}.stochastic[{i}]", "rows must share one width")
            if any(not isinstance(v, (int, float)) or v < 0 for v in row):
                raise ChannelSpecError(f"{path}.stochastic[{i}]", "entries must be >= 0")
            if abs(sum(row) - 1.0) > 1e-9:
                raise ChannelSpecError(f"{path}.stochastic[{i}]", f"row sums to {sum(row)}, expected 1")
        return {"kind": kind, "stochastic": [[float(v) for v in row] for row in rows]}
    if kind == "pure_bloch":
        angles = builtin.get("angles")
        if not isinstance(angles, list) or not angles:
            raise ChannelSpecError(f"{path}.angles", "must be a non-empty list of angles")
        if any(not isinstance(v, (int, float)) for v in angles):
            raise ChannelSpecError(f"{path}.angles", "angles must be numbers")
        return {"kind": kind, "angles": [float(v) for v in angles]}
    lam = builtin.get("lam")
    if not isinstance(lam, (int, float)) or not 0.0 <= lam <= 1.0:
        raise ChannelSpecError(f"{path}.lam", "lam must lie in [0, 1]")
    return {"kind": kind, "lam": float(lam)}


def parse_channel_spec(text: str) -> ChannelSpec:
    """Parse and validate a channel document from its UTF-8 text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelSpecError("<document>", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ChannelSpecError("<document>", "top level must be an object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ChannelSpecError("name", "must be a string")

    has_states = "states" in doc
    has_builtin = "builtin" in doc
    if has_states and has_builtin:
        raise ChannelSpecError("<document>", "'states' and 'builtin' are mutually exclusive")
    if not has_states and not has_builtin:
        raise ChannelSpecError("<document>", "one of 'states' or 'builtin' is required")

    if has_builtin:
        builtin = _validate_builtin(doc["builtin"], "builtin")
        channel = _builtin_channel(builtin)
        declared = doc.get("output_dim", channel.dim)
        if declared != channel.dim:
            raise ChannelSpecError(
                "output_dim", f"declared {declared} but builtin produces {channel.dim}"
            )
        return ChannelSpec(
            name=name,
            output_dim=channel.dim,
            symbols=channel.alphabet,
            builtin=builtin,
        )

    states = doc["states"]
    if not isinstance(states, list) or not states:
        raise ChannelSpecError("states", "must be a non-empty list of [symbol, matrix] pairs")
    symbols = []
    matrices = []
    for i, item in enumerate(states):
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], str):
            raise ChannelSpecError(f"states[{i}]", "expected a [symbol, matrix] pair")
        symbols.append(item[0])
        matrices.append(_pairs_to_matrix(item[1], f"states[{i}].matrix"))
    output_dim = doc.get("output_dim", matrices[0].shape[0])
    if not isinstance(output_dim, int) or output_dim < 1:
        raise ChannelSpecError("output_dim", "must be a positive integer")
    for i, m in enumerate(matrices):
        if m.shape != (output_dim, output_dim):
            raise ChannelSpecError(
                f"states[{i}].matrix", f"shape {m.shape} does not match output_dim {output_dim}"
            )
    try:
        CQChannel(tuple(symbols), matrices)
    except Exception as exc:
        raise ChannelSpecError("states", str(exc)) from None
    return ChannelSpec(
        name=name,
        output_dim=output_dim,
        symbols=tuple(symbols),
        matrices=tuple(matrices),
    )


def load_channel_spec(path) -> ChannelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_channel_spec(fh.read())
