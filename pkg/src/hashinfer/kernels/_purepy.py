"""Numpy implementations of the hot kernels.

These mirror the compiled lane rotation for rotation, so the two lanes
produce identical floating point results wherever reductions are exact.
"""

import numpy as np


def _max_offdiag(a):
    off = np.abs(a)
    off = off - np.diag(np.diag(off))
    return float(off.max())


def jacobi_eigh(a_in, thresh, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps the strict upper triangle in row-major order, annihilating each
    pivot with a Givens rotation, until the largest off-diagonal magnitude
    is <= thresh or max_sweeps full sweeps have run.

    Returns (diag, v, sweeps, off): unsorted eigenvalue estimates, the
    accumulated rotations with eigenvector k in column k, sweeps used, and
    the final off-diagonal maximum.
    """
    a = np.array(a_in, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v, 0, 0.0
    # pivots already far below the target are left alone; the outer loop
    # still re-checks the global maximum, so this only trades sweeps for work
    skip = 0.01 * thresh
    sweeps = 0
    off = _max_offdiag(a)
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or abs(apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                new_p = c * ap - s * aq
                new_q = s * ap + c * aq
                a[:, p] = new_p
                a[p, :] = new_p
                a[:, q] = new_q
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps += 1
        off = _max_offdiag(a)
    return np.diag(a).copy(), v, sweeps, off


def hamming_distance_matrix(queries, database):
    """Pairwise Hamming distances between packed uint64 code rows."""
    q = np.ascontiguousarray(queries, dtype=np.uint64)
    d = np.ascontiguousarray(database, dtype=np.uint64)
    out = np.empty((q.shape[0], d.shape[0]), dtype=np.int64)
    for i in range(q.shape[0]):
        out[i] = np.bitwise_count(d ^ q[i]).sum(axis=1, dtype=np.int64)
    return out


def brute_force_scan(a_in):
    """Exhaustive minimization of x^T A x over x in {-1, +1}^n.

    The first coordinate is pinned to +1 (the objective is sign symmetric)
    and candidates are visited in lexicographic order with -1 before +1,
    keeping strictly better objectives only, so ties resolve to the
    lexicographically smallest minimizer with x_1 = +1.
    """
    a = np.asarray(a_in, dtype=np.float64)
    n = a.shape[0]
    if n == 1:
        return np.ones(1), float(a[0, 0])
    nfree = n - 1
    total = 1 << nfree
    shifts = np.arange(nfree - 1, -1, -1, dtype=np.uint64)
    best = np.inf
    best_x = np.ones(n)
    block = 1 << 13
    for start in range(0, total, block):
        ms = np.arange(start, min(start + block, total), dtype=np.uint64)
        bits = (ms[:, None] >> shifts[None, :]) & np.uint64(1)
        xs = np.empty((ms.shape[0], n))
        xs[:, 0] = 1.0
        xs[:, 1:] = np.where(bits == 1, 1.0, -1.0)
        vals = ((xs @ a) * xs).sum(axis=1)
        j = int(np.argmin(vals))
        if vals[j] < best:
            best = float(vals[j])
            best_x = xs[j].copy()
    return best_x, best
