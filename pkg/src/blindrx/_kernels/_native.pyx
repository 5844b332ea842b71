# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled implementations of the two hot kernels.

Same contracts as ``_kernels._numpy``; see that module for parameter
documentation.  The belief-propagation check update uses exact exclusive
prefix/suffix products instead of the division trick, which is both faster
and numerically exact at t = 0.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atanh, exp, tanh

cnp.import_array()

cdef double LLR_CLAMP = 30.0
cdef double TANH_CLAMP = 1.0 - 1e-12


cdef inline double _clamp(double x, double bound) nogil:
    if x > bound:
        return bound
    if x < -bound:
        return -bound
    return x


def bp_decode(double[::1] llr_in, int[::1] edge_col, int[::1] row_ptr,
              int[::1] row_of_edge, int n_vars, int max_iters):
    cdef int n_edges = edge_col.shape[0]
    cdef int n_checks = row_ptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] posterior_arr = np.empty(n_vars)
    cdef double[::1] posterior = posterior_arr
    cdef double[::1] llr = np.empty(n_vars)
    cdef double[::1] check_msgs = np.zeros(n_edges)
    cdef double[::1] col_sum = np.zeros(n_vars)
    cdef double[::1] t = np.empty(n_edges)
    cdef double[::1] prefix = np.empty(n_edges)
    cdef int it, i, j, e, start, end, parity
    cdef double acc, v, excl
    cdef bint clean_input, ok

    for j in range(n_vars):
        llr[j] = _clamp(llr_in[j], LLR_CLAMP)
        posterior[j] = llr[j]

    # Run at least one round even when the input hard decision already
    # satisfies every check, so the posterior (and hence the extrinsic
    # downstream) carries check-node information.
    clean_input = _syndrome_ok(posterior, edge_col, row_ptr)

    for it in range(1, max_iters + 1):
        for j in range(n_vars):
            col_sum[j] = 0.0
        for e in range(n_edges):
            col_sum[edge_col[e]] += check_msgs[e]
        for e in range(n_edges):
            v = _clamp(llr[edge_col[e]] + col_sum[edge_col[e]]
                       - check_msgs[e], LLR_CLAMP)
            t[e] = tanh(0.5 * v)
        for i in range(n_checks):
            start = row_ptr[i]
            end = row_ptr[i + 1]
            acc = 1.0
            for e in range(start, end):
                prefix[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(end - 1, start - 1, -1):
                excl = _clamp(prefix[e] * acc, TANH_CLAMP)
                acc *= t[e]
                check_msgs[e] = _clamp(2.0 * atanh(excl), LLR_CLAMP)
        for j in range(n_vars):
            col_sum[j] = 0.0
        for e in range(n_edges):
            col_sum[edge_col[e]] += check_msgs[e]
        # posterior stays unclamped so the extrinsic (posterior - input)
        # survives when the input already sits at the clamp bound
        for j in range(n_vars):
            posterior[j] = llr[j] + col_sum[j]
        if clean_input:
            return posterior_arr, 0, True
        ok = _syndrome_ok(posterior, edge_col, row_ptr)
        if ok:
            return posterior_arr, it, True
    return posterior_arr, max_iters, False


cdef bint _syndrome_ok(double[::1] posterior, int[::1] edge_col,
                       int[::1] row_ptr) nogil:
    cdef int i, e, parity
    cdef int n_checks = row_ptr.shape[0] - 1
    for i in range(n_checks):
        parity = 0
        for e in range(row_ptr[i], row_ptr[i + 1]):
            if posterior[edge_col[e]] <= 0:
                parity ^= 1
        if parity:
            return False
    return True


def equalize(double complex[:, ::1] rows, double complex[:, ::1] taps,
             double[::1] inv_noise, double complex[::1] points):
    cdef int n_rx = rows.shape[0]
    cdef int n_sym = rows.shape[1]
    cdef int n_taps = taps.shape[1]
    cdef int n_pts = points.shape[0]
    cdef cnp.ndarray[double, ndim=2] probs_arr = np.empty((n_pts, n_sym))
    cdef cnp.ndarray[double complex, ndim=1] soft_arr = np.zeros(
        n_sym, dtype=np.complex128)
    cdef double[:, ::1] probs = probs_arr
    cdef double complex[::1] soft = soft_arr
    cdef double complex base, d, mean
    cdef double[::1] metric = np.empty(n_pts)
    cdef double best, total, p
    cdef int j, k, ell, m, lim

    for j in range(n_sym):
        for m in range(n_pts):
            metric[m] = 0.0
        lim = n_taps if n_taps <= j + 1 else j + 1
        for k in range(n_rx):
            base = rows[k, j]
            for ell in range(1, lim):
                base = base - taps[k, ell] * soft[j - ell]
            for m in range(n_pts):
                d = base - taps[k, 0] * points[m]
                metric[m] -= inv_noise[k] * (d.real * d.real
                                             + d.imag * d.imag)
        best = metric[0]
        for m in range(1, n_pts):
            if metric[m] > best:
                best = metric[m]
        total = 0.0
        for m in range(n_pts):
            p = exp(metric[m] - best)
            probs[m, j] = p
            total += p
        mean = 0.0
        for m in range(n_pts):
            probs[m, j] /= total
            mean = mean + probs[m, j] * points[m]
        soft[j] = mean
    return probs_arr, soft_arr
