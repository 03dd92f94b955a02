"""Dense GF(2) matrices stored as packed 64-bit row words."""

from __future__ import annotations

import numpy as np
from numba import njit

WORD = 64


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


@njit(cache=True)
def _pack(dense, nwords):
    rows, cols = dense.shape
    out = np.zeros((rows, nwords), dtype=np.uint64)
    for i in range(rows):
        for j in range(cols):
            if dense[i, j]:
                out[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return out


@njit(cache=True)
def _unpack(words, cols):
    rows = words.shape[0]
    out = np.zeros((rows, cols), dtype=np.uint8)
    for i in range(rows):
        for j in range(cols):
            if (words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                out[i, j] = 1
    return out


@njit(cache=True)
def _rref_inplace(words, order):
    """Gauss-Jordan elimination scanning columns in ``order``.

    Rows are permuted so that row t holds the t-th pivot.  Returns the pivot
    columns (length = rank).
    """
    rows, nw = words.shape
    pivots = np.empty(min(rows, order.shape[0]), dtype=np.int64)
    r = 0
    for c in order:
        if r == rows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for i in range(r, rows):
            if words[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for t in range(nw):
                tmp = words[r, t]
                words[r, t] = words[piv, t]
                words[piv, t] = tmp
        for i in range(rows):
            if i != r and (words[i, w] & bit):
                for t in range(nw):
                    words[i, t] ^= words[r, t]
        pivots[r] = c
        r += 1
    return pivots[:r]


class BitMatrix:
    """Binary matrix with rows packed into ``uint64`` words.

    Bit ``j`` of row ``i`` lives in ``words[i, j // 64]`` at position ``j % 64``.
    Instances are treated as immutable; operations return new matrices.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows < 1 or cols < 1:
            raise ValueError(f"BitMatrix needs at least one row and column, got {rows}x{cols}")
        if words.shape != (rows, _nwords(cols)) or words.dtype != np.uint64:
            raise ValueError("packed word array has wrong shape or dtype")
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        arr = np.atleast_2d(np.asarray(dense))
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("BitMatrix entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        rows, cols = arr.shape
        return cls(rows, cols, _pack(arr, _nwords(cols)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=np.uint64))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def row_support(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.to_dense_row(i))

    def to_dense_row(self, i: int) -> np.ndarray:
        return _unpack(self.words[i : i + 1], self.cols)[0]

    def copy(self) -> BitMatrix:
        return BitMatrix(self.rows, self.cols, self.words.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def rref(m: BitMatrix, column_order=None) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form over GF(2).

    Columns are scanned in ``column_order`` (default: natural order).  Row t
    of the result carries the t-th pivot; rows after the rank are zero.
    """
    if column_order is None:
        order = np.arange(m.cols, dtype=np.int64)
    else:
        order = np.asarray(column_order, dtype=np.int64)
        if order.shape != (m.cols,) or not np.array_equal(np.sort(order), np.arange(m.cols)):
            raise ValueError("column_order must be a permutation of the column indices")
    words = m.words.copy()
    pivots = _rref_inplace(words, order)
    return BitMatrix(m.rows, m.cols, words), [int(p) for p in pivots]


def rank(m: BitMatrix) -> int:
    return len(rref(m)[1])


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two dense 0/1 arrays over GF(2)."""
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % 2


def null_space(m: BitMatrix) -> np.ndarray:
    """Basis of ``{x : M x = 0}`` as rows of a dense uint8 array."""
    r, pivots = rref(m)
    dense = r.to_dense()
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = np.zeros((len(free), m.cols), dtype=np.uint8)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for row, p in enumerate(pivots):
            basis[t, p] = dense[row, f]
    return basis
