"""Select the compiled elimination kernel when available, else the Python one."""
from __future__ import annotations

import os

from . import _snf_py

try:  # pragma: no cover - depends on the build
    if os.environ.get("RELCX_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _snf_core as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def dense_diagonal(mat: list[list[int]]) -> list[int]:
    if not mat or not mat[0]:
        return []
    if _compiled is not None:
        try:
            return _compiled.dense_diagonal([row[:] for row in mat])
        except OverflowError:
            return _snf_py.modular_diagonal(mat)
    return _snf_py.dense_diagonal([row[:] for row in mat])
