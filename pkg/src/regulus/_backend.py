"""Kernel backend selection.

The compiled ``_core`` extension is used when importable; the numpy
fallback otherwise, or when ``REGULUS_BACKEND=python``.
"""
import os

from regulus import _fallback

_choice = os.environ.get("REGULUS_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _fallback
else:
    try:
        from regulus import _core as kernels
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _fallback

NAME = "compiled" if kernels is not _fallback else "python"


def get(name=None):
    """Return the kernel module ``name`` ('compiled' or 'python'); default active."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "compiled":
        from regulus import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
