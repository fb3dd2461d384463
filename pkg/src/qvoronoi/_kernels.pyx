# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics must match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, atanh, sqrt, INFINITY

cnp.import_array()


cdef inline void _center_terms(double cx, double cy, double cz, double *alpha, double *beta) noexcept nogil:
    cdef double s = sqrt(cx * cx + cy * cy + cz * cz)
    alpha[0] = 0.5 * log((1.0 - s * s) / 4.0)
    if s > 1e-12:
        beta[0] = atanh(s) / s
    else:
        beta[0] = 1.0


def qubit_max_divergence(const double[:, ::1] centers, const double[:, ::1] points,
                         const double[::1] neg_entropy):
    """max_i D(v_i || c) for every center c; returns (values, argmax)."""
    cdef Py_ssize_t m = centers.shape[0], n = points.shape[0], j, i
    cdef double alpha, beta, best, val
    cdef Py_ssize_t arg
    values = np.empty(m, dtype=np.float64)
    args = np.empty(m, dtype=np.intp)
    cdef double[::1] vv = values
    cdef Py_ssize_t[::1] aa = args
    with nogil:
        for j in range(m):
            _center_terms(centers[j, 0], centers[j, 1], centers[j, 2], &alpha, &beta)
            best = -INFINITY
            arg = 0
            for i in range(n):
                val = neg_entropy[i] - beta * (points[i, 0] * centers[j, 0]
                                               + points[i, 1] * centers[j, 1]
                                               + points[i, 2] * centers[j, 2])
                if val > best:
                    best = val
                    arg = i
            vv[j] = best - alpha
            aa[j] = arg
    return values, args


def qubit_grid_minimax(const double[:, ::1] centers, const double[:, ::1] points,
                       const double[::1] neg_entropy):
    """argmin_c max_i D(v_i || c) over the centers with branch-and-bound pruning.

    Returns (best_index, best_value, farthest_point_index). Ties go to the
    lowest center index.
    """
    cdef Py_ssize_t m = centers.shape[0], n = points.shape[0], j, i, hint = 0
    cdef double alpha, beta, cur, val, bound
    cdef double best_val = INFINITY
    cdef Py_ssize_t best_j = -1, best_far = 0, far
    cdef bint pruned
    with nogil:
        for j in range(m):
            _center_terms(centers[j, 0], centers[j, 1], centers[j, 2], &alpha, &beta)
            bound = best_val + alpha
            # the last farthest point is a good first probe
            cur = neg_entropy[hint] - beta * (points[hint, 0] * centers[j, 0]
                                              + points[hint, 1] * centers[j, 1]
                                              + points[hint, 2] * centers[j, 2])
            far = hint
            pruned = cur >= bound
            if not pruned:
                for i in range(n):
                    val = neg_entropy[i] - beta * (points[i, 0] * centers[j, 0]
                                                   + points[i, 1] * centers[j, 1]
                                                   + points[i, 2] * centers[j, 2])
                    if val > cur or (val == cur and i < far):
                        cur = val
                        far = i
                        if cur >= bound:
                            pruned = True
                            break
            if pruned:
                hint = far
                continue
            best_val = cur - alpha
            best_j = j
            best_far = far
            hint = far
    return best_j, best_val, best_far


def nearest_two(const double[:, ::1] dist):
    """Row-wise argmin (lowest index on ties) and gap to the runner-up."""
    cdef Py_ssize_t n = dist.shape[0], k = dist.shape[1], p, s, arg
    cdef double b1, b2, v
    idx = np.empty(n, dtype=np.intp)
    margin = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] ii = idx
    cdef double[::1] mm = margin
    with nogil:
        for p in range(n):
            b1 = INFINITY
            b2 = INFINITY
            arg = 0
            for s in range(k):
                v = dist[p, s]
                if v < b1:
                    b2 = b1
                    b1 = v
                    arg = s
                elif v < b2:
                    b2 = v
            ii[p] = arg
            mm[p] = b2 - b1 if k > 1 else INFINITY
    return idx, margin
