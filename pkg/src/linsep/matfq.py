"""Exact dense linear algebra over prime fields.

Matrices are immutable wrappers around int64 numpy arrays with canonical
entries in ``[0, q)``.  Elimination and multiplication run on the compiled
kernels when available (see ``_kernels``); everything here is exact — no
floating point is involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from ._kernels import mat_mul, rref_augmented
from .errors import (
    ContractError,
    FieldMismatchError,
    InsufficientRankError,
    NoSolutionError,
    SingularMatrixError,
)
from .gf import FieldSpec


@dataclass(frozen=True)
class MatrixFq:
    """An immutable matrix over a prime field."""

    array: npt.NDArray[np.int64]
    spec: FieldSpec

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.array, dtype=np.int64)
        if arr.ndim != 2:
            raise ContractError(f"matrix must be 2-D, got shape {arr.shape}")
        arr = arr % self.spec.q
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @classmethod
    def _wrap(cls, array: npt.NDArray[np.int64], spec: FieldSpec) -> MatrixFq:
        """Wrap an array whose entries are already canonical (internal use)."""
        out = object.__new__(cls)
        array = np.ascontiguousarray(array, dtype=np.int64)
        array.setflags(write=False)
        object.__setattr__(out, "array", array)
        object.__setattr__(out, "spec", spec)
        return out

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence[int]]) -> MatrixFq:
        return cls(np.array(rows, dtype=np.int64).reshape(len(rows), -1), spec)

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> MatrixFq:
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), spec)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> MatrixFq:
        return cls._wrap(np.eye(n, dtype=np.int64), spec)

    @classmethod
    def random(cls, spec: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> MatrixFq:
        return cls._wrap(rng.integers(0, spec.q, size=(rows, cols), dtype=np.int64), spec)

    @property
    def rows(self) -> int:
        return int(self.array.shape[0])

    @property
    def cols(self) -> int:
        return int(self.array.shape[1])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixFq)
            and self.spec == other.spec
            and self.array.shape == other.array.shape
            and bool(np.array_equal(self.array, other.array))
        )

    def __matmul__(self, other: MatrixFq) -> MatrixFq:
        if other.spec != self.spec:
            raise FieldMismatchError("cannot multiply matrices over different fields")
        if self.cols != other.rows:
            raise ContractError(
                f"shape mismatch for product: {self.array.shape} @ {other.array.shape}"
            )
        return MatrixFq._wrap(mat_mul(self.array, other.array, self.spec.q), self.spec)

    def transpose(self) -> MatrixFq:
        return MatrixFq._wrap(np.ascontiguousarray(self.array.T), self.spec)

    def scale_row(self, index: int, factor: int) -> MatrixFq:
        out = self.array.copy()
        out[index] = out[index] * (factor % self.spec.q) % self.spec.q
        return MatrixFq._wrap(out, self.spec)

    def row(self, index: int) -> npt.NDArray[np.int64]:
        return self.array[index]

    def is_zero(self) -> bool:
        return not self.array.any()

    def to_lists(self) -> list[list[int]]:
        return self.array.tolist()

    def __repr__(self) -> str:
        return f"MatrixFq({self.array.tolist()}, q={self.spec.q})"


@dataclass(frozen=True)
class RrefResult:
    """Reduced row echelon form together with the row operations that made it.

    ``transform`` is an invertible rows x rows matrix with
    ``transform @ input == rref``.
    """

    rref: MatrixFq
    rank: int
    pivot_cols: tuple[int, ...]
    transform: MatrixFq = field(repr=False)


def rref(m: MatrixFq) -> RrefResult:
    """Reduced row echelon form of ``m`` with the accumulated transform."""
    n_rows, n_cols = m.rows, m.cols
    work = np.hstack([m.array, np.eye(n_rows, dtype=np.int64)])
    work = np.ascontiguousarray(work)
    pivots = rref_augmented(work, m.spec.q, n_cols)
    return RrefResult(
        rref=MatrixFq._wrap(work[:, :n_cols].copy(), m.spec),
        rank=len(pivots),
        pivot_cols=tuple(int(p) for p in pivots),
        transform=MatrixFq._wrap(work[:, n_cols:].copy(), m.spec),
    )


def rank(m: MatrixFq) -> int:
    """Rank of ``m`` over its field."""
    work = np.ascontiguousarray(m.array.copy())
    return len(rref_augmented(work, m.spec.q, m.cols))


def left_nullspace_basis(m: MatrixFq) -> MatrixFq:
    """Canonical basis of ``{v : v @ m == 0}`` as rows of a matrix.

    The basis comes from the standard free-variable construction on the RREF
    of ``m`` transposed; each vector is scaled so its first nonzero entry is 1,
    and vectors are ordered by increasing free-column index.  The result has
    ``rows(m) - rank(m)`` rows (possibly zero).
    """
    q = m.spec.q
    n = m.rows
    work = np.ascontiguousarray(m.array.T.copy())
    pivots = rref_augmented(work, q, n)
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((len(free_cols), n), dtype=np.int64)
    for i, f in enumerate(free_cols):
        basis[i, f] = 1
        for pivot_row, p in enumerate(pivots):
            basis[i, p] = -int(work[pivot_row, f]) % q
        lead = int(np.nonzero(basis[i])[0][0])
        lead_val = int(basis[i, lead])
        if lead_val != 1:
            basis[i] = basis[i] * pow(lead_val, -1, q) % q
    return MatrixFq._wrap(basis, m.spec)


def invert(m: MatrixFq) -> MatrixFq:
    """Inverse of a square matrix.

    Raises:
        SingularMatrixError: if ``m`` is not square or not invertible.
    """
    if m.rows != m.cols:
        raise SingularMatrixError(f"only square matrices can be inverted, got {m.array.shape}")
    n = m.rows
    work = np.ascontiguousarray(np.hstack([m.array, np.eye(n, dtype=np.int64)]))
    pivots = rref_augmented(work, m.spec.q, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix of rank {len(pivots)} < {n} is singular")
    return MatrixFq._wrap(work[:, n:].copy(), m.spec)


def first_independent_columns(m: MatrixFq, count: int) -> list[int]:
    """Greedy (lexicographically smallest) set of ``count`` independent columns.

    Raises:
        InsufficientRankError: if ``rank(m) < count`` (carries the rank achieved).
    """
    if count < 0:
        raise ContractError(f"count must be nonnegative, got {count}")
    work = np.ascontiguousarray(m.array.copy())
    pivots = rref_augmented(work, m.spec.q, m.cols)
    if len(pivots) < count:
        raise InsufficientRankError(
            f"requested {count} independent columns but rank is {len(pivots)}",
            rank=len(pivots),
        )
    return [int(p) for p in pivots[:count]]


def select_columns(m: MatrixFq, cols: Iterable[int]) -> MatrixFq:
    """Submatrix of the given columns, in the given order."""
    idx = list(cols)
    if any(not 0 <= c < m.cols for c in idx):
        raise ContractError(f"column index out of range for a {m.rows}x{m.cols} matrix: {idx}")
    return MatrixFq._wrap(np.ascontiguousarray(m.array[:, idx]), m.spec)


def stack_rows(blocks: Sequence[MatrixFq]) -> MatrixFq:
    """Vertical concatenation of matrices over the same field."""
    if not blocks:
        raise ContractError("cannot stack an empty list of blocks")
    spec = blocks[0].spec
    width = blocks[0].cols
    for b in blocks[1:]:
        if b.spec != spec:
            raise FieldMismatchError("cannot stack matrices over different fields")
        if b.cols != width:
            raise ContractError(f"cannot stack widths {width} and {b.cols}")
    return MatrixFq._wrap(np.vstack([b.array for b in blocks]), spec)


def solve_row_combination(basis: MatrixFq, targets: MatrixFq) -> MatrixFq:
    """Coefficients ``X`` with ``X @ basis == targets``.

    Each target row must lie in the row space of ``basis``; free coefficients
    are set to zero, so the answer is unique when ``basis`` has full row rank.

    Raises:
        NoSolutionError: if some target row is outside the row space.
    """
    if basis.spec != targets.spec:
        raise FieldMismatchError("basis and targets must live over the same field")
    if basis.cols != targets.cols:
        raise ContractError(f"width mismatch: basis has {basis.cols} columns, targets {targets.cols}")
    k = basis.rows
    work = np.ascontiguousarray(np.hstack([basis.array.T, targets.array.T]))
    pivots = rref_augmented(work, basis.spec.q, k)
    r = len(pivots)
    if work[r:, k:].any():
        raise NoSolutionError("target rows are not a combination of the basis rows")
    coeffs = np.zeros((targets.rows, k), dtype=np.int64)
    for pivot_row, p in enumerate(pivots):
        coeffs[:, p] = work[pivot_row, k:]
    return MatrixFq._wrap(coeffs, basis.spec)
