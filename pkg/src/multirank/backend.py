"""Kernel backend selection.

The EM hot loops exist twice: a Cython extension (``multirank._kernels``)
and a pure-numpy fallback (``multirank._kernels_py``).  The compiled module
is preferred when importable.  Set the environment variable
``MULTIRANK_BACKEND`` to ``compiled`` or ``python``, or call :func:`use`,
to override.
"""

from __future__ import annotations

import os

from multirank import _kernels_py

try:
    from multirank import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active_name = "compiled" if _compiled is not None else "python"
_env = os.environ.get("MULTIRANK_BACKEND")
if _env:
    if _env not in ("python", "compiled"):
        raise ValueError(f"MULTIRANK_BACKEND must be 'python' or 'compiled', got {_env!r}")
    if _env not in _BACKENDS:
        raise RuntimeError("MULTIRANK_BACKEND=compiled but the extension is not built")
    _active_name = _env


def available() -> tuple[str, ...]:
    """Names of the importable backends."""
    return tuple(sorted(_BACKENDS))


def name() -> str:
    """Name of the currently active backend."""
    return _active_name


def active():
    """The active kernel module."""
    return _BACKENDS[_active_name]


def get(backend_name: str):
    """A specific kernel module by name (for benchmarks and parity tests)."""
    if backend_name not in _BACKENDS:
        raise ValueError(f"backend {backend_name!r} not available; have {available()}")
    return _BACKENDS[backend_name]


def use(backend_name: str) -> None:
    """Select the active backend by name."""
    global _active_name
    if backend_name not in _BACKENDS:
        raise ValueError(f"backend {backend_name!r} not available; have {available()}")
    _active_name = backend_name
