# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled fast path for the hot kernels.

Rotation formulas and stopping rules match kernels._purepy element for
element, so the two lanes agree bit for bit on the Jacobi path.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()

cdef extern from *:
    long long __builtin_popcountll(unsigned long long) nogil


cdef double _max_offdiag(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double m = 0.0, v
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v = a[i, j]
            if v < 0.0:
                v = -v
            if v > m:
                m = v
    return m


def jacobi_eigh(a_in, double thresh, int max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Same contract as the numpy lane: returns (diag, v, sweeps, off).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(a_in, dtype=np.float64, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] v_arr = np.eye(n)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, i
    cdef int sweeps = 0
    cdef double off, apq, app, aqq, tau, t, c, s, aip, aiq, vip, viq
    # pivots already far below the target are left alone; the outer loop
    # still re-checks the global maximum, so this only trades sweeps for work
    cdef double skip = 0.01 * thresh
    if n == 1:
        return np.diag(a_arr).copy(), v_arr, 0, 0.0
    off = _max_offdiag(a, n)
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or (apq if apq > 0.0 else -apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[p, i] = a[i, p]
                    a[i, q] = s * aip + c * aiq
                    a[q, i] = a[i, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
        sweeps += 1
        off = _max_offdiag(a, n)
    return np.diag(a_arr).copy(), v_arr, sweeps, off


def hamming_distance_matrix(queries, database):
    """Pairwise Hamming distances between packed uint64 code rows."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] q = np.ascontiguousarray(queries, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] d = np.ascontiguousarray(database, dtype=np.uint64)
    cdef Py_ssize_t nq = q.shape[0], nd = d.shape[0], w = q.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((nq, nd), dtype=np.int64)
    cdef Py_ssize_t i, j, k
    cdef long long acc
    with nogil:
        for i in range(nq):
            for j in range(nd):
                acc = 0
                for k in range(w):
                    acc += __builtin_popcountll(q[i, k] ^ d[j, k])
                out[i, j] = acc
    return out


def brute_force_scan(a_in):
    """Exhaustive minimization of x^T A x over sign vectors, x_1 pinned to +1.

    Same enumeration order and tie handling as the numpy lane.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(a_in, dtype=np.float64, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef double[:, ::1] a = a_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_arr = np.ones(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = np.ones(n)
    cdef double[::1] x = x_arr
    cdef double[::1] best_x = best_arr
    cdef double best = INFINITY, f, row
    cdef Py_ssize_t nfree = n - 1
    cdef unsigned long long m, total
    cdef Py_ssize_t i, j
    if n == 1:
        return best_arr, float(a[0, 0])
    total = (<unsigned long long>1) << nfree
    with nogil:
        for m in range(total):
            for j in range(nfree):
                if (m >> (nfree - 1 - j)) & 1:
                    x[j + 1] = 1.0
                else:
                    x[j + 1] = -1.0
            f = 0.0
            for i in range(n):
                row = 0.0
                for j in range(n):
                    row += a[i, j] * x[j]
                f += x[i] * row
            if f < best:
                best = f
                for i in range(n):
                    best_x[i] = x[i]
    return best_arr, best
