# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Ryser permanent, weighted permutation sums and
batched Newton divided-difference tables."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def permanent_ryser(const double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long k, gray, prev, total_steps
    cdef double prod, acc = 0.0
    cdef int sign = 1
    if n == 0:
        return 1.0
    cdef double[::1] rowsum = np.zeros(n)
    total_steps = (<unsigned long long>1) << n
    prev = 0
    for k in range(1, total_steps):
        gray = k ^ (k >> 1)
        j = 0
        while not ((gray ^ prev) >> j) & 1:
            j += 1
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] += a[i, j]
        else:
            for i in range(n):
                rowsum[i] -= a[i, j]
        prev = gray
        sign = -sign
        prod = 1.0
        for i in range(n):
            prod *= rowsum[i]
        acc += sign * prod
    if n % 2 == 1:
        acc = -acc
    return acc


def weighted_permutation_sum(const double[:, ::1] a, const long[:, ::1] perms, const double[::1] weights):
    cdef Py_ssize_t m = perms.shape[0]
    cdef Py_ssize_t n = perms.shape[1]
    cdef Py_ssize_t p, i
    cdef double prod, acc = 0.0
    for p in range(m):
        if weights[p] == 0.0:
            continue
        prod = weights[p]
        for i in range(n):
            prod *= a[i, perms[p, i]]
        acc += prod
    return acc


def newton_divdiff_batch(const double[:, ::1] xs, const double[:, ::1] fs):
    cdef Py_ssize_t m = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1] - 1
    cdef Py_ssize_t r, i, j
    # node-major copies so the innermost loop runs contiguously over rows
    cdef double[:, ::1] x = np.ascontiguousarray(np.asarray(xs).T)
    cdef double[:, ::1] work = np.array(np.asarray(fs).T, order="C")
    for j in range(1, n + 1):
        for i in range(n, j - 1, -1):
            for r in range(m):
                work[i, r] = (work[i, r] - work[i - 1, r]) / (x[i, r] - x[i - j, r])
    return np.array(work[n])
