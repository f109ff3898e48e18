"""Backend selection for the series kernels.

The compiled extension is preferred. Set ``ENDOCONJ_PURE_PYTHON=1`` to force
the NumPy fallback (the test suite runs both).
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("ENDOCONJ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py
    else:
        BACKEND = "cython"
else:
    _impl = _kernels_py

mul_trunc = _impl.mul_trunc
power_table = _impl.power_table
eval_monomials = _impl.eval_monomials

__all__ = ["BACKEND", "mul_trunc", "power_table", "eval_monomials"]
