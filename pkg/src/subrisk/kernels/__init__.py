"""Hot loops with two interchangeable backends.

``SUBRISK_BACKEND=numpy`` forces the vectorised fallback; the default is
``numba`` when it imports and numpy otherwise. Every public function in
this package that reaches a kernel also accepts ``backend=`` to override
the environment per call.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import numpy_impl

ENV_VAR = "SUBRISK_BACKEND"
BACKENDS = ("numba", "numpy")

try:
    from . import numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None


def default_backend() -> str:
    name = os.environ.get(ENV_VAR, "").strip().lower()
    if name in ("", "auto"):
        return "numba" if numba_impl is not None else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"{ENV_VAR} must be one of {BACKENDS}, got {name!r}")
    return name


def get(backend: str | None = None) -> ModuleType:
    name = default_backend() if backend is None else backend
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return numba_impl
    raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
