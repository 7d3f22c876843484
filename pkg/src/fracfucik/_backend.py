"""Select the pair-kernel implementation at import time.

The compiled extension is preferred.  Set ``FRACFUCIK_PURE_PYTHON=1`` to
force the NumPy fallback (for example to compare results or timings).
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("FRACFUCIK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        kernels = _compiled
        BACKEND = "compiled"


def get(name):
    """Return backend ``name`` ("compiled" or "python") as a module."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels as _compiled

        return _compiled
    raise ValueError(f"unknown backend {name!r}")
