"""Backend selection for the integer matrix kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used. Set ``GROUPSLICES_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

BACKEND = "python"

if os.environ.get("GROUPSLICES_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import inverse, matmul, rank  # type: ignore[import-not-found]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        pass

if BACKEND == "python":
    from ._pykernels import inverse, matmul, rank  # noqa: F811

__all__ = ["BACKEND", "inverse", "matmul", "rank"]
