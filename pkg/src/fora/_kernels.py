"""Kernel backend selection.

The compiled ``_core`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module. Set ``FORA_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _pykernels as python_kernels

compiled_kernels = None
if os.environ.get("FORA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None

active = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = active.BACKEND


def get(name: str | None = None):
    """Return the kernel module for ``name`` ('cython', 'python') or the active one."""
    if name is None:
        return active
    if name == "python":
        return python_kernels
    if name == "cython":
        if compiled_kernels is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    return ["python"] + (["cython"] if compiled_kernels is not None else [])
