"""Kernel backend selection.

The compiled extension is preferred when present; set WIGMORE_PURE_PYTHON=1
to force the pure-Python kernel (used by the benchmark and for debugging).
"""

import os

if os.environ.get("WIGMORE_PURE_PYTHON"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
