"""Kernel backend selection.

The compiled Cython extension is preferred when present; the NumPy module
is the fallback. ``SPECAMP_BACKEND=python`` or ``SPECAMP_BACKEND=cython``
forces the choice, and :func:`select` switches it at runtime (the CLI's
``--backend`` flag and manifest re-runs use that).
"""

from __future__ import annotations

import os

from specamp import _kernels_py

_AVAILABLE = {"python": _kernels_py}
try:
    from specamp import _kernels

    _AVAILABLE["cython"] = _kernels
except ImportError:
    _kernels = None

_active = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_AVAILABLE))


def select(name: str):
    """Make ``name`` ('python', 'cython', or 'auto') the active backend."""
    global _active
    if name == "auto":
        name = "cython" if "cython" in _AVAILABLE else "python"
    if name not in _AVAILABLE:
        raise ValueError(
            f"backend {name!r} is not available (have: {', '.join(available_backends())})"
        )
    _active = _AVAILABLE[name]
    return _active


def kernels():
    """Return the active kernel module."""
    return _active


def active_name() -> str:
    return _active.NAME


select(os.environ.get("SPECAMP_BACKEND", "auto").strip().lower() or "auto")
