# cython: language_level=3
"""Compiled twins of the hot kernels (see ``_core_py`` for the contracts).

Everything runs on C-contiguous int64 buffers with canonical entries in
``[0, q)``; single products fit in int64 because q < 2**31, and accumulators
are reduced mod q before they can overflow.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef long long _inv_mod(long long a, long long q) noexcept nogil:
    """Inverse of ``a`` mod prime ``q`` by the extended Euclidean algorithm."""
    cdef long long r = q, new_r = a % q
    cdef long long t = 0, new_t = 1
    cdef long long quotient, tmp
    while new_r != 0:
        quotient = r // new_r
        tmp = r - quotient * new_r
        r = new_r
        new_r = tmp
        tmp = t - quotient * new_t
        t = new_t
        new_t = tmp
    t %= q
    if t < 0:
        t += q
    return t


def mat_mul(a, b, long long q):
    """Exact ``(a @ b) % q``.

    Walks rows of ``b`` (ikj order) so the inner loop is contiguous, and defers
    the reduction: after a full reduction every cell is below q, and each
    accumulation adds at most ``(q-1)**2``, so ``guard`` additions fit in int64.
    """
    cdef Py_ssize_t n = a.shape[0], inner = a.shape[1], m = b.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((n, m), dtype=np.int64)
    cdef const long long[:, ::1] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const long long[:, ::1] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef long long[:, ::1] ov = out
    cdef Py_ssize_t i, j, k, since_reduce
    cdef long long aik
    cdef long long guard = (<long long>0x7FFFFFFFFFFFFFFF - q) // ((q - 1) * (q - 1) if q > 1 else 1)
    with nogil:
        for i in range(n):
            since_reduce = 0
            for k in range(inner):
                aik = av[i, k]
                if aik == 0:
                    continue
                for j in range(m):
                    ov[i, j] += aik * bv[k, j]
                since_reduce += 1
                if since_reduce >= guard:
                    for j in range(m):
                        ov[i, j] %= q
                    since_reduce = 0
            if since_reduce > 0:
                for j in range(m):
                    ov[i, j] %= q
    return out


def rref_augmented(cnp.ndarray[cnp.int64_t, ndim=2] work, long long q, Py_ssize_t limit_cols):
    """Gauss-Jordan elimination in place; pivots only in the first columns.

    Returns the pivot column indices in increasing order.
    """
    cdef long long[:, ::1] w = work
    cdef Py_ssize_t n_rows = work.shape[0], n_cols = work.shape[1]
    cdef Py_ssize_t row = 0, col, r, c, pivot_row
    cdef long long pivot, inv, factor
    pivots = []
    for col in range(limit_cols):
        if row >= n_rows:
            break
        pivot_row = -1
        for r in range(row, n_rows):
            if w[r, col] != 0:
                pivot_row = r
                break
        if pivot_row < 0:
            continue
        with nogil:
            if pivot_row != row:
                for c in range(n_cols):
                    pivot = w[row, c]
                    w[row, c] = w[pivot_row, c]
                    w[pivot_row, c] = pivot
            pivot = w[row, col]
            if pivot != 1:
                inv = _inv_mod(pivot, q)
                for c in range(n_cols):
                    w[row, c] = (w[row, c] * inv) % q
            for r in range(n_rows):
                if r == row:
                    continue
                factor = w[r, col]
                if factor != 0:
                    for c in range(n_cols):
                        w[r, c] = (w[r, c] - factor * w[row, c]) % q
                        if w[r, c] < 0:
                            w[r, c] += q
        pivots.append(col)
        row += 1
    return pivots
