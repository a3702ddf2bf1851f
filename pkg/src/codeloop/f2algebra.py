"""Bit-packed vectors and matrices over the two-element field.

A vector is stored as a Python int; coordinate ``i`` is bit ``i`` (so
coordinate 0 is the least significant bit).  The string form lists
coordinate 0 first, matching how generator rows are written in code files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionError


def parity(v):
    """Parity of the popcount, for an int or an integer numpy array."""
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count() & 1
    return np.bitwise_count(v).astype(np.int64) & 1


def iter_bits(v: int) -> Iterator[int]:
    """Indices of the set bits of ``v`` in ascending order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def reverse_bits(v: int, length: int) -> int:
    out = 0
    for i in iter_bits(v):
        out |= 1 << (length - 1 - i)
    return out


@dataclass(frozen=True)
class BitVec:
    """Fixed-length vector over F2."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise DimensionError(f"bits {self.bits:#x} exceed length {self.length}")

    @classmethod
    def from_string(cls, text: str) -> "BitVec":
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"not a bit: {ch!r}")
        return cls(len(text), bits)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVec":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise DimensionError(f"index {i} out of range for length {length}")
            bits ^= 1 << i
        return cls(length, bits)

    @classmethod
    def unit(cls, length: int, i: int) -> "BitVec":
        return cls.from_indices(length, [i])

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: "BitVec") -> "BitVec":
        return add(self, other)

    def __and__(self, other: "BitVec") -> "BitVec":
        return meet(self, other)

    def support(self) -> list[int]:
        return list(iter_bits(self.bits))

    @property
    def weight(self) -> int:
        return self.bits.bit_count()


def _check(v: BitVec, w: BitVec) -> None:
    if v.length != w.length:
        raise DimensionError(f"length mismatch: {v.length} != {w.length}")


def weight(v: BitVec) -> int:
    return v.bits.bit_count()


def meet(v: BitVec, w: BitVec) -> BitVec:
    """Coordinatewise AND (set intersection of supports)."""
    _check(v, w)
    return BitVec(v.length, v.bits & w.bits)


def add(v: BitVec, w: BitVec) -> BitVec:
    _check(v, w)
    return BitVec(v.length, v.bits ^ w.bits)


@dataclass(frozen=True)
class BitMatrix:
    """Rows of equal length over F2."""

    ncols: int
    rows: tuple[BitVec, ...] = ()

    def __post_init__(self):
        for r in self.rows:
            if r.length != self.ncols:
                raise DimensionError(f"row of length {r.length} in matrix with {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], ncols: int | None = None) -> "BitMatrix":
        rows = tuple(rows)
        if ncols is None:
            if not rows:
                raise DimensionError("cannot infer the column count of an empty matrix")
            ncols = rows[0].length
        return cls(ncols, rows)

    @classmethod
    def from_strings(cls, lines: Sequence[str], ncols: int | None = None) -> "BitMatrix":
        return cls.from_rows([BitVec.from_string(s) for s in lines], ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def ints(self) -> list[int]:
        return [r.bits for r in self.rows]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]


def rref(m: BitMatrix) -> tuple[BitMatrix, int]:
    """Reduced row-echelon form with pivots chosen from coordinate 0 upward.

    Zero rows are dropped, so the returned basis has exactly ``rank`` rows,
    ordered by pivot column.
    """
    work = [r for r in m.ints() if r]
    pivot_row = 0
    for col in range(m.ncols):
        bit = 1 << col
        found = next((r for r in range(pivot_row, len(work)) if work[r] & bit), None)
        if found is None:
            continue
        work[pivot_row], work[found] = work[found], work[pivot_row]
        p = work[pivot_row]
        for r in range(len(work)):
            if r != pivot_row and work[r] & bit:
                work[r] ^= p
        pivot_row += 1
        if pivot_row == len(work):
            break
    basis = BitMatrix(m.ncols, tuple(BitVec(m.ncols, r) for r in work[:pivot_row]))
    return basis, pivot_row


def rank(m: BitMatrix) -> int:
    return rref(m)[1]


def span_iter(basis: BitMatrix) -> Iterator[BitVec]:
    """All sums of subsets of the basis rows.

    The i-th vector yielded is the sum of the rows selected by the binary
    digits of i, row 0 being the least significant digit.
    """
    rows = basis.ints()
    for mask in range(1 << len(rows)):
        yield BitVec(basis.ncols, _subset_sum(rows, mask))


def _subset_sum(rows: Sequence[int], mask: int) -> int:
    acc = 0
    for i in iter_bits(mask):
        acc ^= rows[i]
    return acc


def span_array(basis: BitMatrix | Sequence[int]) -> np.ndarray:
    """Every span element as an array of ints, indexed by subset mask.

    Only valid while the column count fits in 63 bits.
    """
    rows = basis.ints() if isinstance(basis, BitMatrix) else list(basis)
    out = np.zeros(1, dtype=np.int64)
    for r in rows:
        out = np.concatenate([out, out ^ np.int64(r)])
    return out
