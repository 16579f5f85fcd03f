"""Kernel backend selection: compiled core with a pure-numpy fallback.

The compiled extension is optional; when it is missing (source checkout
without a build step) the numpy kernels are used.  Set the environment
variable ``MDLINK_BACKEND`` to ``cython`` or ``python`` to force a choice,
or call :func:`set_backend` at runtime (used by the backend-parity tests
and the kernel benchmark).
"""

from __future__ import annotations

import os
import warnings

from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_MODULES = {"python": _pykernels}
if _ckernels is not None:
    _MODULES["cython"] = _ckernels


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_MODULES))


def _initial() -> str:
    requested = os.environ.get("MDLINK_BACKEND", "").strip().lower()
    if requested:
        if requested in _MODULES:
            return requested
        warnings.warn(
            f"MDLINK_BACKEND={requested!r} unavailable; "
            f"choices are {available_backends()}"
        )
    return "cython" if "cython" in _MODULES else "python"


_active = _initial()


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


def kernels():
    return _MODULES[_active]
