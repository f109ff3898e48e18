# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for truncated power series arithmetic.

Same signatures and semantics as :mod:`endoconj._kernels_py`.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.intp_t idx_t


# products written out in real arithmetic: C99 complex multiplication goes
# through the NaN-safe __muldc3 helper, which dominates these loops
cdef inline double complex cmul(double complex x, double complex y) noexcept nogil:
    cdef double complex r
    r.real = x.real * y.real - x.imag * y.imag
    r.imag = x.real * y.imag + x.imag * y.real
    return r


def mul_trunc(const double complex[::1] a, const double complex[::1] b,
              const idx_t[::1] ti, const idx_t[::1] tj, const idx_t[::1] tk,
              Py_ssize_t size):
    cdef double complex[::1] out
    cdef Py_ssize_t t, ntrip = ti.shape[0]
    cdef double complex ai
    result = np.zeros(size, dtype=np.complex128)
    out = result
    with nogil:
        for t in range(ntrip):
            ai = a[ti[t]]
            if ai.real == 0.0 and ai.imag == 0.0:
                continue
            out[tk[t]] += cmul(ai, b[tj[t]])
    return result


def power_table(const double complex[:, ::1] g,
                const idx_t[::1] parent, const idx_t[::1] var,
                const idx_t[::1] ti, const idx_t[::1] tj, const idx_t[::1] tk,
                Py_ssize_t size):
    cdef Py_ssize_t count = parent.shape[0]
    cdef Py_ssize_t k, t, p, v, ntrip = ti.shape[0]
    cdef double complex ai
    result = np.zeros((count, size), dtype=np.complex128)
    cdef double complex[:, ::1] out = result
    if count == 0:
        return result
    out[0, 0] = 1.0
    with nogil:
        for k in range(1, count):
            p = parent[k]
            v = var[k]
            for t in range(ntrip):
                ai = out[p, ti[t]]
                if ai.real == 0.0 and ai.imag == 0.0:
                    continue
                out[k, tk[t]] += cmul(ai, g[v, tj[t]])
    return result


def eval_monomials(const double complex[:, ::1] points,
                   const idx_t[::1] parent, const idx_t[::1] var):
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t count = parent.shape[0]
    cdef Py_ssize_t s, k
    result = np.empty((npts, count), dtype=np.complex128)
    cdef double complex[:, ::1] out = result
    with nogil:
        for s in range(npts):
            out[s, 0] = 1.0
            for k in range(1, count):
                out[s, k] = cmul(out[s, parent[k]], points[s, var[k]])
    return result
