"""Dense linear algebra over GF(2).

Vectors are packed into Python integers: coordinate ``i`` is bit ``i``
(least significant bit first).  XOR of two integers is vector addition, so
elimination costs one big-int XOR per row operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class StructureError(ValueError):
    """Raised when vectors or matrices have incompatible shapes."""


def lowbit(x: int) -> int:
    """Index of the least significant set bit of ``x`` (``x`` must be > 0)."""
    return (x & -x).bit_length() - 1


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class BitVector:
    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise StructureError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise StructureError(f"bits set beyond length {self.length}")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> BitVector:
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range for length {length}")
            bits ^= 1 << i
        return cls(length, bits)

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> BitVector:
        bits = 0
        for i, e in enumerate(entries):
            if e & 1:
                bits |= 1 << i
        return cls(len(entries), bits)

    @classmethod
    def from_string(cls, s: str) -> BitVector:
        """Parse ``"110"`` as coordinates 0, 1, 2 (left to right)."""
        return cls.from_list([int(ch) for ch in s])

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"index {i} out of range for length {self.length}")
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: BitVector) -> BitVector:
        _check_len(self.length, other.length)
        return BitVector(self.length, self.bits ^ other.bits)

    def __and__(self, other: BitVector) -> BitVector:
        _check_len(self.length, other.length)
        return BitVector(self.length, self.bits & other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def dot(self, other: BitVector) -> int:
        _check_len(self.length, other.length)
        return (self.bits & other.bits).bit_count() & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())


def _check_len(a: int, b: int) -> None:
    if a != b:
        raise StructureError(f"length mismatch: {a} != {b}")


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix.

    ``rank_cache`` is only filled by :func:`row_reduce`; it is never trusted
    for matrices built by hand.
    """

    ncols: int
    rows: tuple[int, ...] = ()
    rank_cache: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise StructureError(f"row has bits beyond column {self.ncols}")

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], ncols: int | None = None) -> BitMatrix:
        if ncols is None:
            if not vectors:
                raise StructureError("cannot infer column count of an empty matrix")
            ncols = vectors[0].length
        for v in vectors:
            if v.length != ncols:
                raise StructureError(f"row of length {v.length} in matrix with {ncols} columns")
        return cls(ncols, tuple(v.bits for v in vectors))

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        return cls.from_vectors([BitVector.from_list(r) for r in rows], ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, tuple(1 << i for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def vectors(self) -> list[BitVector]:
        return [BitVector(self.ncols, r) for r in self.rows]

    def to_lists(self) -> list[list[int]]:
        return [BitVector(self.ncols, r).to_list() for r in self.rows]

    def pivots(self) -> list[int]:
        return [lowbit(r) for r in self.rows if r]

    def mul_vector(self, v: BitVector) -> BitVector:
        """Matrix-vector product ``M v``."""
        _check_len(self.ncols, v.length)
        return BitVector(self.nrows, sum(((r & v.bits).bit_count() & 1) << i for i, r in enumerate(self.rows)))


def _reduce_rows(rows: Iterable[int]) -> dict[int, int]:
    """Fully reduced echelon form as a ``pivot -> row`` map."""
    basis: dict[int, int] = {}
    for r in rows:
        for p, b in basis.items():
            if (r >> p) & 1:
                r ^= b
        if not r:
            continue
        p = lowbit(r)
        for q in basis:
            if (basis[q] >> p) & 1:
                basis[q] ^= r
        basis[p] = r
    return basis


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, int]:
    """Reduced row-echelon form and rank.

    Zero rows are dropped, so the result has exactly ``rank`` rows, ordered
    by strictly increasing pivot column.  The row space is unchanged.
    """
    basis = _reduce_rows(m.rows)
    rows = tuple(basis[p] for p in sorted(basis))
    return BitMatrix(m.ncols, rows, rank_cache=len(rows)), len(rows)


def rank(m: BitMatrix) -> int:
    if m.rank_cache is not None:
        return m.rank_cache
    return row_reduce(m)[1]


def _require_reduced(basis: BitMatrix) -> None:
    if basis.rank_cache is None:
        raise StructureError("basis must come from row_reduce")


def span_coefficients(basis: BitMatrix, v: BitVector) -> list[int] | None:
    """Row indices of ``basis`` summing to ``v``, or None if ``v`` is outside the span."""
    _require_reduced(basis)
    _check_len(basis.ncols, v.length)
    x = v.bits
    used = []
    for i, r in enumerate(basis.rows):
        if (x >> lowbit(r)) & 1:
            x ^= r
            used.append(i)
    return used if x == 0 else None


def span_contains(basis: BitMatrix, v: BitVector) -> bool:
    return span_coefficients(basis, v) is not None


def null_space(m: BitMatrix) -> BitMatrix:
    """Basis of ``{x : M x = 0}``, one vector per free column."""
    reduced, r = row_reduce(m)
    pivot_rows = {lowbit(row): row for row in reduced.rows}
    out = []
    for f in range(m.ncols):
        if f in pivot_rows:
            continue
        x = 1 << f
        for p, row in pivot_rows.items():
            if (row >> f) & 1:
                x |= 1 << p
        out.append(x)
    return BitMatrix(m.ncols, tuple(out))


class EchelonBasis:
    """Growing echelon basis for incremental rank computation.

    Rows are kept keyed by pivot (lowest set bit) but are not back-reduced,
    which keeps insertion at one pass over the current pivots.
    """

    def __init__(self, ncols: int) -> None:
        self.ncols = ncols
        self._rows: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, x: int) -> int:
        rows = self._rows
        while x:
            p = lowbit(x)
            r = rows.get(p)
            if r is None:
                return x
            x ^= r
        return 0

    def insert(self, x: int) -> bool:
        """Add ``x`` to the span; True iff the rank went up."""
        x = self.reduce(x)
        if not x:
            return False
        self._rows[lowbit(x)] = x
        return True

    def contains(self, x: int) -> bool:
        return self.reduce(x) == 0

    def rows(self) -> list[int]:
        return list(self._rows.values())

    def to_matrix(self) -> BitMatrix:
        return row_reduce(BitMatrix(self.ncols, tuple(self._rows.values())))[0]
