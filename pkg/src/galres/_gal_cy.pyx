# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair kernels.

Mirrors _gal_py.py operation for operation (same traversal and the same
Neumaier accumulation sequence), so the two backends return bit-identical
floats.  Keep both files in sync when editing either.
"""

from libc.math cimport exp, fabs


cdef inline double _dist(long long[::1] codes, long long[::1] exps,
                         Py_ssize_t a0, Py_ssize_t a1,
                         Py_ssize_t b0, Py_ssize_t b1,
                         double[::1] logp) noexcept nogil:
    cdef double d = 0.0
    cdef Py_ssize_t i = a0, j = b0
    cdef long long ci, cj, diff
    while i < a1 and j < b1:
        ci = codes[i]
        cj = codes[j]
        if ci == cj:
            diff = exps[i] - exps[j]
            if diff != 0:
                d += (diff if diff > 0 else -diff) * logp[ci]
            i += 1
            j += 1
        elif ci < cj:
            d += exps[i] * logp[ci]
            i += 1
        else:
            d += exps[j] * logp[cj]
            j += 1
    while i < a1:
        d += exps[i] * logp[codes[i]]
        i += 1
    while j < b1:
        d += exps[j] * logp[codes[j]]
        j += 1
    return d


def pair_gal_sum(long long[::1] indptr, long long[::1] codes,
                 long long[::1] exps, double[::1] logp, double alpha):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef double s = 0.0, c = 0.0, x, t
    cdef Py_ssize_t i, j, a0, a1
    for i in range(n):
        a0 = indptr[i]
        a1 = indptr[i + 1]
        for j in range(i + 1, n):
            x = exp(-alpha * _dist(codes, exps, a0, a1,
                                   indptr[j], indptr[j + 1], logp))
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return <double>n + 2.0 * (s + c)


def pair_gal_weighted(long long[::1] indptr, long long[::1] codes,
                      long long[::1] exps, double[::1] logp,
                      int kind, double scale_c, double apar):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef double s = 0.0, c = 0.0, w, t, lp
    cdef Py_ssize_t i, j, a0, a1, b0, b1, ii, jj
    cdef long long diff
    for i in range(n):
        a0 = indptr[i]
        a1 = indptr[i + 1]
        for j in range(i + 1, n):
            b0 = indptr[j]
            b1 = indptr[j + 1]
            w = 1.0
            ii = a0
            jj = b0
            while w != 0.0 and (ii < a1 or jj < b1):
                if ii < a1 and jj < b1 and codes[ii] == codes[jj]:
                    diff = exps[ii] - exps[jj]
                    lp = logp[codes[ii]]
                    ii += 1
                    jj += 1
                elif jj >= b1 or (ii < a1 and codes[ii] < codes[jj]):
                    diff = exps[ii]
                    lp = logp[codes[ii]]
                    ii += 1
                else:
                    diff = exps[jj]
                    lp = logp[codes[jj]]
                    jj += 1
                if diff == 0:
                    continue
                if diff < 0:
                    diff = -diff
                if kind == 0:
                    w *= scale_c * exp(-0.5 * diff * lp)
                elif diff > 1:
                    w = 0.0
                elif kind == 1:
                    w *= scale_c / (exp(0.5 * lp) - 1.0)
                else:
                    w *= scale_c / (exp(0.5 * apar * lp) - 1.0)
            t = s + w
            if fabs(s) >= fabs(w):
                c += (s - t) + w
            else:
                c += (w - t) + s
            s = t
    return <double>n + 2.0 * (s + c)


cdef inline bint _divides(long long[::1] codes, long long[::1] exps,
                          Py_ssize_t a0, Py_ssize_t a1,
                          Py_ssize_t b0, Py_ssize_t b1) noexcept nogil:
    cdef Py_ssize_t i = a0, j
    cdef long long cj
    for j in range(b0, b1):
        cj = codes[j]
        while i < a1 and codes[i] < cj:
            i += 1
        if i == a1 or codes[i] != cj or exps[i] < exps[j]:
            return 0
        i += 1
    return 1


def pair_gal_subsum(long long[::1] indptr, long long[::1] codes,
                    long long[::1] exps, double[::1] logp,
                    double[::1] logm, double alpha):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef double s = 0.0, c = 0.0, x, t
    cdef Py_ssize_t i, j, a0, a1
    for i in range(n):
        a0 = indptr[i]
        a1 = indptr[i + 1]
        for j in range(n):
            if i == j:
                continue
            if logm[j] <= logm[i] and _divides(codes, exps, a0, a1,
                                               indptr[j], indptr[j + 1]):
                x = exp(-alpha * (logm[i] - logm[j]))
                t = s + x
                if fabs(s) >= fabs(x):
                    c += (s - t) + x
                else:
                    c += (x - t) + s
                s = t
    return <double>n + (s + c)


def gal_matrix_fill(long long[::1] indptr, long long[::1] codes,
                    long long[::1] exps, double[::1] logp,
                    double alpha, double[:, ::1] out):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, j, a0, a1
    cdef double v
    for i in range(n):
        out[i, i] = 1.0
        a0 = indptr[i]
        a1 = indptr[i + 1]
        for j in range(i + 1, n):
            v = exp(-alpha * _dist(codes, exps, a0, a1,
                                   indptr[j], indptr[j + 1], logp))
            out[i, j] = v
            out[j, i] = v


def divis_matrix_fill(long long[::1] indptr, long long[::1] codes,
                      long long[::1] exps, double[::1] logp,
                      double[::1] logm, double[:, ::1] out):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, j, a0, a1
    for i in range(n):
        a0 = indptr[i]
        a1 = indptr[i + 1]
        for j in range(n):
            if i == j:
                out[i, j] = 1.0
            elif logm[j] <= logm[i] and _divides(codes, exps, a0, a1,
                                                 indptr[j], indptr[j + 1]):
                out[i, j] = exp(-0.5 * (logm[i] - logm[j]))
            else:
                out[i, j] = 0.0


cdef void _subset_rec(double[:, ::1] ratio, Py_ssize_t u, Py_ssize_t n_pick,
                      Py_ssize_t start, Py_ssize_t depth, double pairsum,
                      long long[::1] chosen, double* best,
                      long long[::1] best_idx) noexcept nogil:
    cdef Py_ssize_t e, k
    cdef double gain
    if depth == n_pick:
        if pairsum > best[0]:
            best[0] = pairsum
            for k in range(n_pick):
                best_idx[k] = chosen[k]
        return
    for e in range(start, u - (n_pick - depth) + 1):
        gain = 0.0
        for k in range(depth):
            gain += ratio[e, chosen[k]]
        chosen[depth] = e
        _subset_rec(ratio, u, n_pick, e + 1, depth + 1, pairsum + gain,
                    chosen, best, best_idx)


def max_subset_sum(double[:, ::1] ratio, Py_ssize_t n_pick):
    import numpy as np
    cdef Py_ssize_t u = ratio.shape[0]
    chosen_arr = np.zeros(n_pick, dtype=np.int64)
    best_arr = np.zeros(n_pick, dtype=np.int64)
    cdef long long[::1] chosen = chosen_arr
    cdef long long[::1] best_idx = best_arr
    cdef double best = -1.0
    _subset_rec(ratio, u, n_pick, 0, 0, 0.0, chosen, &best, best_idx)
    return <double>n_pick + 2.0 * best, [int(v) for v in best_arr]
