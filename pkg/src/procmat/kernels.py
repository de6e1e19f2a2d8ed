"""Backend selection for the hot enumeration kernels.

The compiled Cython module is used when it was built; otherwise the numpy
implementation with identical results is used.
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def get(backend: str = "auto"):
    """Module providing ``best_a_first`` and ``best_b_first`` for the requested backend."""
    if backend == "auto":
        return _compiled or _kernels_py
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available; rebuild the package with Cython")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")
