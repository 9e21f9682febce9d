"""Backend selection for the bit-mask kernels.

The compiled extension is used when it imports and the vertex count fits in
64 bits; otherwise the pure-Python twin runs. Set ``GRAPHFLOW_PURE_PYTHON=1``
to force the fallback everywhere.
"""
from __future__ import annotations

import os

from . import _pykernels as python

compiled = None
if os.environ.get("GRAPHFLOW_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

BACKEND = compiled.NAME if compiled is not None else python.NAME


def for_width(d: int):
    """Kernel module able to hold masks of ``d`` bits."""
    if compiled is not None and d <= compiled.MAX_WIDTH:
        return compiled
    return python
