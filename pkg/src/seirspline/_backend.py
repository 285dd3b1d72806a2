"""Kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is absent. SEIRSPLINE_BACKEND=python forces the fallback (useful
for the benchmark and for debugging); SEIRSPLINE_BACKEND=compiled makes a
missing extension a hard error.
"""

import os

_requested = os.environ.get("SEIRSPLINE_BACKEND", "").strip().lower()

if _requested in ("", "compiled", "c"):
    try:
        from . import _kernels as kernels
    except ImportError:
        if _requested:
            raise
        from . import _kernels_py as kernels
elif _requested in ("python", "py", "pure"):
    from . import _kernels_py as kernels
else:
    raise RuntimeError(f"unknown SEIRSPLINE_BACKEND value: {_requested!r}")

BACKEND = kernels.BACKEND_NAME
