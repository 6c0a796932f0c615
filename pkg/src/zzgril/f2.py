"""Exact linear algebra over the two-element field.

Vectors are Python ints used as bitsets: bit ``i`` set means coordinate
``i`` equals 1.  Addition is XOR, so every operation here is exact.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from zzgril.errors import ParameterError


def bits(v: int) -> Iterator[int]:
    """Yield the indices of set bits of ``v`` in increasing order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def from_indices(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


class Echelon:
    """Incrementally maintained reduced basis keyed by leading (highest) bit.

    Each stored vector carries a ``tag`` bitset recording which inserted
    vectors it is a combination of, so membership tests can also return
    coordinates.
    """

    def __init__(self) -> None:
        self._pivots: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        """Reduce ``v`` against the basis; return (remainder, accumulated tag)."""
        pivots = self._pivots
        while v:
            top = v.bit_length() - 1
            hit = pivots.get(top)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        self._pivots[v.bit_length() - 1] = (v, tag)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0


def rank_of(vectors: Iterable[int]) -> int:
    ech = Echelon()
    return sum(1 for v in vectors if ech.add(v))


def kernel(columns: Sequence[int]) -> list[int]:
    """Basis of {c : sum_j c_j * columns[j] = 0}, each returned as a bitset over j."""
    ech = Echelon()
    out = []
    for j, col in enumerate(columns):
        rem, tag = ech.reduce(col, 1 << j)
        if rem:
            ech._pivots[rem.bit_length() - 1] = (rem, tag)
        else:
            out.append(tag)
    return out


class F2Matrix:
    """Sparse matrix over F2 stored column-wise as bitsets."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, columns: Sequence[int] | None = None):
        if rows < 0 or cols < 0:
            raise ParameterError("matrix dimensions must be non-negative")
        columns = [0] * cols if columns is None else list(columns)
        if len(columns) != cols:
            raise ParameterError(f"expected {cols} columns, got {len(columns)}")
        for c in columns:
            if c < 0 or c.bit_length() > rows:
                raise ParameterError("column has entries outside the row range")
        self.rows = rows
        self.cols = cols
        self.columns = columns

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_dense(cls, a) -> "F2Matrix":
        a = np.asarray(a, dtype=np.int64) % 2
        if a.ndim != 2:
            raise ParameterError("dense matrix must be 2-dimensional")
        rows, cols = a.shape
        return cls(rows, cols, [from_indices(np.flatnonzero(a[:, j]).tolist()) for j in range(cols)])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j, c in enumerate(self.columns):
            for i in bits(c):
                out[i, j] = 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.columns[j] >> i) & 1

    def rank(self) -> int:
        return rank_of(self.columns)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.rows:
            raise ParameterError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for c in other.columns:
            acc = 0
            for i in bits(c):
                acc ^= self.columns[i]
            out.append(acc)
        return F2Matrix(self.rows, other.cols, out)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols}, rank={self.rank()})"
