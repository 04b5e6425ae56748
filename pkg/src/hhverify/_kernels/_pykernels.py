"""Pure-Python versions of the compiled kernels.

Same operations in the same order as ``_ckernels.pyx`` so both backends
return bit-identical results.
"""

import numpy as np


def permanent_ryser(a):
    n = a.shape[0]
    if n == 0:
        return 1.0
    cols = [[float(a[i, j]) for i in range(n)] for j in range(n)]
    rowsum = [0.0] * n
    acc = 0.0
    sign = 1
    prev = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        j = ((gray ^ prev) & -(gray ^ prev)).bit_length() - 1
        col = cols[j]
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] += col[i]
        else:
            for i in range(n):
                rowsum[i] -= col[i]
        prev = gray
        sign = -sign
        prod = 1.0
        for r in rowsum:
            prod *= r
        acc += sign * prod
    if n % 2 == 1:
        acc = -acc
    return acc


def weighted_permutation_sum(a, perms, weights):
    rows = a.tolist()
    acc = 0.0
    for perm, w in zip(perms.tolist(), weights.tolist()):
        if w == 0.0:
            continue
        prod = w
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        acc += prod
    return acc


def newton_divdiff_batch(xs, fs):
    n = xs.shape[1] - 1
    work = np.array(fs, dtype=float, copy=True)
    for j in range(1, n + 1):
        for i in range(n, j - 1, -1):
            work[:, i] = (work[:, i] - work[:, i - 1]) / (xs[:, i] - xs[:, i - j])
    return work[:, n].copy()
