"""NumPy implementations of the series kernels.

Used when the compiled extension is unavailable, or when
``ENDOCONJ_PURE_PYTHON=1`` is set. The multiplication table is a list of
triples ``(i, j, k)`` meaning "monomial i times monomial j is monomial k",
restricted to products that survive truncation.
"""

from __future__ import annotations

import numpy as np


def mul_trunc(a, b, ti, tj, tk, size):
    prod = a[ti] * b[tj]
    return (np.bincount(tk, weights=prod.real, minlength=size)
            + 1j * np.bincount(tk, weights=prod.imag, minlength=size))


def power_table(g, parent, var, ti, tj, tk, size):
    """Row k holds the coefficients of g**exps[k]; rows are built from their parent."""
    count = parent.shape[0]
    out = np.zeros((count, size), dtype=np.complex128)
    if count == 0:
        return out
    out[0, 0] = 1.0
    for k in range(1, count):
        out[k] = mul_trunc(out[parent[k]], g[var[k]], ti, tj, tk, size)
    return out


def eval_monomials(points, parent, var):
    npts = points.shape[0]
    count = parent.shape[0]
    out = np.empty((npts, count), dtype=np.complex128)
    out[:, 0] = 1.0
    for k in range(1, count):
        out[:, k] = out[:, parent[k]] * points[:, var[k]]
    return out
