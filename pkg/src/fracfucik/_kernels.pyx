# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-quadrature kernels.

Each quadrature pair q contributes ``w[q] * |d_q|^p`` with
``d_q = sum_k coef[q, k] * u[idx[q, k]]``.  Loops run in index order so
reductions are reproducible.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


cdef inline double _diff(const long long[:, ::1] idx, const double[:, ::1] coef,
                         const double[::1] u, Py_ssize_t q, Py_ssize_t K) noexcept nogil:
    cdef double d = 0.0
    cdef Py_ssize_t k
    for k in range(K):
        d += coef[q, k] * u[idx[q, k]]
    return d


cdef inline int _int_exponent(double e) noexcept nogil:
    """``e`` as a small nonnegative integer, or -1 when it is not one."""
    if e >= 0.0 and e <= 16.0 and e == <int>e:
        return <int>e
    return -1


cdef inline double _pow(double a, double e, int ie) noexcept nogil:
    # repeated multiplication for integer exponents; libm pow otherwise
    cdef double r = 1.0
    cdef int k
    if ie < 0:
        return pow(a, e)
    for k in range(ie):
        r *= a
    return r


def pair_diff(const long long[:, ::1] idx, const double[:, ::1] coef,
              const double[::1] u):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q
    out = np.empty(Q)
    cdef double[::1] o = out
    with nogil:
        for q in range(Q):
            o[q] = _diff(idx, coef, u, q, K)
    return out


def pair_energy(const long long[:, ::1] idx, const double[:, ::1] coef,
                const double[::1] w, const double[::1] u, double p):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q
    cdef double total = 0.0, a
    cdef int ip = _int_exponent(p)
    with nogil:
        for q in range(Q):
            a = fabs(_diff(idx, coef, u, q, K))
            total += w[q] * _pow(a, p, ip)
    return total


def pair_energy_grad(const long long[:, ::1] idx, const double[:, ::1] coef,
                     const double[::1] w, const double[::1] u, double p,
                     double[::1] out):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q, k
    cdef double total = 0.0, d, a, ap2, s
    cdef bint quad = p == 2.0
    cdef int ip = _int_exponent(p - 2.0)
    with nogil:
        for q in range(Q):
            d = _diff(idx, coef, u, q, K)
            a = fabs(d)
            if quad:
                total += w[q] * a * a
                s = 2.0 * w[q] * d
            else:
                ap2 = _pow(a, p - 2.0, ip)
                total += w[q] * ap2 * a * a
                s = p * w[q] * ap2 * d
            for k in range(K):
                out[idx[q, k]] += s * coef[q, k]
    return total


def pair_form(const long long[:, ::1] idx, const double[:, ::1] coef,
              const double[::1] w, const double[::1] u, const double[::1] v,
              double p):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q
    cdef double total = 0.0, du, dv
    cdef bint quad = p == 2.0
    cdef int ip = _int_exponent(p - 2.0)
    with nogil:
        for q in range(Q):
            du = _diff(idx, coef, u, q, K)
            dv = _diff(idx, coef, v, q, K)
            if quad:
                total += w[q] * du * dv
            else:
                total += w[q] * _pow(fabs(du), p - 2.0, ip) * du * dv
    return total


def pair_weights(const long long[:, ::1] idx, const double[:, ::1] coef,
                 const double[::1] w, const double[::1] u, double p):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q
    out = np.empty(Q)
    cdef double[::1] o = out
    cdef int ip = _int_exponent(p - 2.0)
    with nogil:
        for q in range(Q):
            if p == 2.0:
                o[q] = w[q]
            else:
                o[q] = w[q] * _pow(fabs(_diff(idx, coef, u, q, K)), p - 2.0, ip)
    return out


def pair_gram(const long long[:, ::1] idx, const double[:, ::1] coef,
              const double[::1] w, double[:, ::1] out):
    cdef Py_ssize_t Q = idx.shape[0], K = idx.shape[1], q, k, l
    cdef long long i
    cdef double wk
    with nogil:
        for q in range(Q):
            for k in range(K):
                if coef[q, k] == 0.0:
                    continue
                i = idx[q, k]
                wk = w[q] * coef[q, k]
                for l in range(K):
                    out[i, idx[q, l]] += wk * coef[q, l]
    return None
