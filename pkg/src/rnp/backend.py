"""Kernel backend selection.

The hot loops (Monte-Carlo trials, chain evolution) exist twice: a Cython
extension (rnp._kernels) and a NumPy fallback (rnp._kernels_py) with
bit-identical outputs.  The compiled one is preferred when importable;
set RNP_BACKEND=python or RNP_BACKEND=compiled to force a choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:  # pragma: no cover - depends on the build environment
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover
    _kernels = None

_FORCED = os.environ.get("RNP_BACKEND", "").strip().lower()
if _FORCED == "python":
    _impl = _kernels_py
elif _FORCED == "compiled":
    if _kernels is None:
        raise ImportError("RNP_BACKEND=compiled but the rnp._kernels extension is not built")
    _impl = _kernels
else:
    _impl = _kernels if _kernels is not None else _kernels_py

NAME: str = _impl.NAME
philox_uniforms = _impl.philox_uniforms
mc_consumed_pairs = _impl.mc_consumed_pairs
chain_evolve = _impl.chain_evolve
chain_scan = _impl.chain_scan


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _kernels is not None else ("python",)


def get_backend(name: str):
    """Return the raw backend module by name (for benchmarks and tests)."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _kernels is None:
            raise ImportError("compiled backend not available")
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
