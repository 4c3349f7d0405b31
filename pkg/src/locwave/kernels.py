"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports; otherwise the numpy
fallback.  Set ``LOCWAVE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("LOCWAVE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
j01_real = _impl.j01_real
j0_real = _impl.j0_real
j1_real = _impl.j1_real
csinc = _impl.csinc
sinc_series = _impl.sinc_series


def backends():
    """All importable backends, keyed by name (used by tests and benchmarks)."""
    out = {"numpy": _kernels_py}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
