"""Pure numpy implementations of the hot kernels.

Same contracts as the compiled twin in ``_corex.pyx``; used when the extension
is unavailable or when ``LINSEP_PURE_PYTHON=1`` forces it.  All arrays are
C-contiguous int64 with canonical entries in ``[0, q)``.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

BACKEND_NAME = "python"

_INT64_MAX = np.iinfo(np.int64).max


def mat_mul(a: npt.NDArray[np.int64], b: npt.NDArray[np.int64], q: int) -> npt.NDArray[np.int64]:
    """Exact ``(a @ b) % q`` without int64 overflow.

    Partial products are accumulated in chunks small enough that
    ``chunk * (q-1)**2`` stays below the int64 ceiling.
    """
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    # Leave room to add a reduced partial sum (< q) to a fresh chunk product.
    chunk = max(1, int((_INT64_MAX - q) // max(1, (q - 1) ** 2)))
    if inner <= chunk:
        return (a @ b) % q
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for start in range(0, inner, chunk):
        stop = min(start + chunk, inner)
        out = (out + a[:, start:stop] @ b[start:stop, :]) % q
    return out


def rref_augmented(work: npt.NDArray[np.int64], q: int, limit_cols: int) -> list[int]:
    """Gauss-Jordan elimination in place, pivoting only in the first columns.

    ``work`` is reduced so that each pivot column (within ``work[:, :limit_cols]``)
    holds a 1 with zeros above and below; columns past ``limit_cols`` (typically
    an appended identity/transform block) just ride along with the row ops.

    Returns:
        The pivot column indices in increasing order (their count is the rank).
    """
    n_rows = work.shape[0]
    pivots: list[int] = []
    row = 0
    for col in range(limit_cols):
        if row >= n_rows:
            break
        nonzero = np.nonzero(work[row:, col])[0]
        if nonzero.size == 0:
            continue
        pivot_row = int(nonzero[0]) + row
        if pivot_row != row:
            work[[row, pivot_row]] = work[[pivot_row, row]]
        pivot = int(work[row, col])
        if pivot != 1:
            work[row] = work[row] * pow(pivot, -1, q) % q
        factors = work[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            work[hit] = (work[hit] - np.outer(factors[hit], work[row])) % q
        pivots.append(col)
        row += 1
    return pivots
