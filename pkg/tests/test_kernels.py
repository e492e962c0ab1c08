"""The compiled kernels and the pure-python fallback must agree exactly."""

from __future__ import annotations

import numpy as np
import pytest

from linsep import _core_py

try:
    from linsep import _corex
except ImportError:  # pragma: no cover - build without the extension
    _corex = None

BACKENDS = [_core_py] if _corex is None else [_core_py, _corex]


def reference_mat_mul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Big-integer reference, immune to int64 overflow."""
    return ((a.astype(object) @ b.astype(object)) % q).astype(np.int64)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND_NAME)
@pytest.mark.parametrize("q", [2, 3, 101, 2_147_483_647])
def test_mat_mul_matches_big_integer_reference(backend, q: int):
    rng = np.random.default_rng(20260814 + q)
    for n_rows, inner, n_cols in [(1, 1, 1), (3, 4, 2), (7, 11, 5), (6, 40, 6)]:
        a = rng.integers(0, q, size=(n_rows, inner), dtype=np.int64)
        b = rng.integers(0, q, size=(inner, n_cols), dtype=np.int64)
        assert np.array_equal(backend.mat_mul(a, b, q), reference_mat_mul(a, b, q))


@pytest.mark.skipif(_corex is None, reason="compiled extension not built")
@pytest.mark.parametrize("q", [2, 5, 101, 65_537])
def test_backends_produce_identical_elimination(q: int):
    rng = np.random.default_rng(q)
    for n_rows, n_cols in [(1, 1), (4, 4), (3, 7), (8, 3), (6, 6)]:
        base = rng.integers(0, q, size=(n_rows, n_cols), dtype=np.int64)
        work_py = np.ascontiguousarray(base.copy())
        work_cx = np.ascontiguousarray(base.copy())
        piv_py = _core_py.rref_augmented(work_py, q, n_cols)
        piv_cx = _corex.rref_augmented(work_cx, q, n_cols)
        assert list(piv_py) == list(piv_cx)
        assert np.array_equal(work_py, work_cx)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND_NAME)
def test_elimination_respects_the_pivot_column_limit(backend):
    q = 7
    work = np.array([[0, 0, 1, 0], [0, 0, 0, 1]], dtype=np.int64)
    pivots = backend.rref_augmented(work, q, 2)
    assert list(pivots) == []
    assert np.array_equal(work, [[0, 0, 1, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND_NAME)
def test_mat_mul_near_the_modulus_ceiling(backend):
    q = 2_147_483_647
    rng = np.random.default_rng(7)
    a = rng.integers(q - 50, q, size=(4, 9), dtype=np.int64)
    b = rng.integers(q - 50, q, size=(9, 4), dtype=np.int64)
    assert np.array_equal(backend.mat_mul(a, b, q), reference_mat_mul(a, b, q))
