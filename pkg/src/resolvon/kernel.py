"""Selection-loop backend: compiled kernel when built, numpy fallback otherwise.

The backend is fixed at import time (overridable per call or via the
RESOLVON_KERNEL environment variable, values "compiled" or "python"). Both
backends implement the identical algorithm; they may differ in the last bits
of intermediate floats, so each is deterministic on its own but codebooks are
only guaranteed to coincide across backends when argmax margins exceed
rounding noise.
"""

import os

import numpy as np

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

_ENV_VAR = "RESOLVON_KERNEL"


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _compiled is not None else ("python",)


def default_backend() -> str:
    forced = os.environ.get(_ENV_VAR)
    if forced:
        if forced not in ("python", "compiled"):
            raise ValueError(f"{_ENV_VAR} must be 'python' or 'compiled', got {forced!r}")
        if forced == "compiled" and _compiled is None:
            raise ValueError("compiled kernel requested but not built")
        return forced
    return "compiled" if _compiled is not None else "python"


def select_codebook(edges, eps: float, rounds: int, backend: str | None = None):
    """Dispatch to the selected backend; see _kernel_py.select_codebook."""
    b = backend if backend is not None else default_backend()
    if b == "python":
        return _kernel_py.select_codebook(edges, eps, rounds)
    if b == "compiled":
        if _compiled is None:
            raise ValueError("compiled kernel is not available")
        sel, inc = _compiled.select_codebook(np.asarray(edges), float(eps), int(rounds))
        return sel, inc
    raise ValueError(f"unknown backend {b!r}")
