"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-python twin is
the fallback. ``SETWISE_CD_BACKEND=python|cython`` forces a choice (useful
for benchmarking and parity tests).
"""

from __future__ import annotations

import os

from . import _pykernels


def _load_default():
    forced = os.environ.get("SETWISE_CD_BACKEND")
    if forced == "python":
        return _pykernels, "python"
    try:
        from . import _ckernels

        return _ckernels, "cython"
    except ImportError:
        if forced == "cython":
            raise
        return _pykernels, "python"


KERNELS, BACKEND = _load_default()


def available_backends() -> list[str]:
    out = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        out.insert(0, "cython")
    except ImportError:
        pass
    return out


def get_kernels(name: str | None = None):
    """Kernel module for ``name`` ('cython' or 'python'); default backend if None."""
    if name is None:
        return KERNELS
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
