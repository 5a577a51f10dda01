"""Bit-packed linear algebra over GF(2).

Matrices are stored row-major, 64 columns per uint64 word, little-endian
bit order inside each word (column c lives in word c >> 6, bit c & 63).
This layout is fixed so that serialized matrices are portable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_WORD = 64


def _n_words(cols: int) -> int:
    return (cols + _WORD - 1) >> 6


def _tail_mask(cols: int) -> np.uint64:
    """Mask of valid bits in the last word of a row."""
    used = cols & 63
    if used == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << used) - 1)


@dataclass
class BitMatrix:
    """Dense binary matrix with rows packed into uint64 words.

    Attributes:
        rows: number of rows (may be 0).
        cols: number of columns (may be 0).
        data: uint64 array of shape (rows, ceil(cols / 64)).

    Bits at column positions >= cols are kept zero.
    """

    rows: int
    cols: int
    data: np.ndarray

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.set(i, i, 1)
        return m

    @classmethod
    def from_array(cls, a: np.ndarray) -> "BitMatrix":
        """Packs a 2-D 0/1 array."""
        a = np.asarray(a, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows, cols = a.shape
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols)
        nbytes = _n_words(cols) * 8
        packed = np.packbits(a, axis=1, bitorder="little")
        if packed.shape[1] < nbytes:
            pad = np.zeros((rows, nbytes - packed.shape[1]), dtype=np.uint8)
            packed = np.hstack([packed, pad])
        return cls(rows, cols, np.ascontiguousarray(packed).view(np.uint64))

    def to_array(self) -> np.ndarray:
        """Unpacks to a (rows, cols) uint8 array."""
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=np.uint8)
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols]

    def get(self, r: int, c: int) -> int:
        self._check(r, c)
        return int((self.data[r, c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def set(self, r: int, c: int, value: int) -> None:
        self._check(r, c)
        mask = np.uint64(1) << np.uint64(c & 63)
        if value & 1:
            self.data[r, c >> 6] |= mask
        else:
            self.data[r, c >> 6] &= ~mask

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def _check(self, r: int, c: int) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"bit ({r}, {c}) outside {self.rows}x{self.cols}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )


def rank_gf2(m: BitMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination.

    Pivot columns are scanned left to right and the topmost unused row is
    chosen for each pivot, so the elimination order is deterministic.
    """
    if m.rows == 0 or m.cols == 0:
        return 0
    work = m.data.copy()
    return rank_words(work, np.arange(m.cols, dtype=np.int64))


def rank_words(work: np.ndarray, cols: np.ndarray) -> int:
    """Destructive rank of packed rows, pivoting only on the given columns.

    `cols` holds packed column positions (word = c >> 6, bit = c & 63) in the
    order pivots are tried.  Row operations touch whole rows, which leaves the
    rank over the selected columns unchanged.
    """
    nrows = work.shape[0]
    r = 0
    one = np.uint64(1)
    for c in cols:
        w = int(c) >> 6
        mask = one << np.uint64(int(c) & 63)
        hit = np.nonzero(work[r:, w] & mask)[0]
        if hit.size == 0:
            continue
        p = r + int(hit[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        rest = hit[1:] + r
        if rest.size:
            work[rest] ^= work[r]
        r += 1
        if r == nrows:
            break
    return r


def select_columns(m: BitMatrix, cols) -> BitMatrix:
    """Submatrix with the given columns, in ascending order.

    Args:
        m: source matrix.
        cols: iterable of distinct column indices.

    Returns:
        BitMatrix with m.rows rows and len(cols) columns.
    """
    idx = np.asarray(sorted(int(c) for c in cols), dtype=np.int64)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= m.cols:
            raise IndexError("column index out of range")
        if np.any(idx[1:] == idx[:-1]):
            raise ValueError("duplicate column index")
    out = BitMatrix.zeros(m.rows, int(idx.size))
    if m.rows == 0 or idx.size == 0:
        return out
    bits = m.to_array()[:, idx]
    return BitMatrix.from_array(bits)


def random_bitmatrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Uniformly random matrix: every bit is an independent fair coin."""
    if rows == 0 or cols == 0:
        return BitMatrix.zeros(rows, cols)
    bits = rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)
    return BitMatrix.from_array(bits)


def parity_per_row(words: np.ndarray) -> np.ndarray:
    """Parity of the popcount of each packed row, as uint8."""
    counts = np.bitwise_count(words)
    return (counts.sum(axis=1) & 1).astype(np.uint8)
