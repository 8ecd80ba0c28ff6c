"""Dense 0/1 matrices over the Boolean semiring.

Rows are bit-packed into numpy uint8 arrays (little bit order), so OR, AND,
domination and equality run word-parallel; padding bits past the last
column are kept zero, which makes byte-level comparisons exact.  Matrices
are immutable after construction and safe to share across threads.

The Kronecker product refuses to materialize results above a configurable
entry limit; callers working at that scale verify covers lazily instead
(see :mod:`boolrank.cover`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, FormatError, MaterializationLimitError

#: Dense results above this many entries are refused unless overridden.
DEFAULT_MAX_ENTRIES = 2**31

_ENV_MAX_ENTRIES = "BOOLRANK_MAX_ENTRIES"


def max_entries_limit(override: int | None = None) -> int:
    """Resolve the materialization limit: explicit arg, else env, else default."""
    if override is not None:
        return override
    env = os.environ.get(_ENV_MAX_ENTRIES)
    return int(env) if env else DEFAULT_MAX_ENTRIES


class BoolMatrix:
    """An immutable 0/1 matrix with bit-packed rows.

    ``bits`` has shape ``(rows, ceil(cols/8))`` and dtype uint8; bit ``j`` of
    row ``i`` lives at ``bits[i, j >> 3] >> (j & 7)``.
    """

    __slots__ = ("rows", "cols", "bits")

    def __init__(self, rows: int, cols: int, bits: np.ndarray):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative dimensions {rows}x{cols}")
        nbytes = (cols + 7) // 8
        if bits.shape != (rows, nbytes) or bits.dtype != np.uint8:
            raise DimensionError(
                f"packed buffer shape {bits.shape} does not match {rows}x{cols}"
            )
        self.rows = rows
        self.cols = cols
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        self.bits = bits

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> BoolMatrix:
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError("dense input must be 2-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("entries must be 0 or 1")
        rows, cols = arr.shape
        packed = np.packbits(arr, axis=1, bitorder="little")
        if packed.shape[1] != (cols + 7) // 8:  # degenerate 0-column case
            packed = np.zeros((rows, (cols + 7) // 8), dtype=np.uint8)
        return cls(rows, cols, packed)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BoolMatrix:
        return cls(rows, cols, np.zeros((rows, (cols + 7) // 8), dtype=np.uint8))

    @classmethod
    def ones(cls, rows: int, cols: int) -> BoolMatrix:
        return cls.from_dense(np.ones((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> BoolMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_packed(cls, rows: int, cols: int, bits: np.ndarray) -> BoolMatrix:
        """Adopt an already-packed buffer; padding bits must be zero."""
        return cls(rows, cols, bits)

    # -- accessors ---------------------------------------------------------

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionError(f"index ({i},{j}) outside {self.rows}x{self.cols}")
        return (self.bits[i, j >> 3] >> (j & 7)) & 1

    def to_dense(self) -> np.ndarray:
        if self.cols == 0:
            return np.zeros((self.rows, 0), dtype=np.uint8)
        return np.unpackbits(self.bits, axis=1, bitorder="little", count=self.cols)

    def count_ones(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def is_zero(self) -> bool:
        return not self.bits.any()

    def row_mask(self, i: int) -> np.ndarray:
        """Packed bits of row ``i`` (read-only view)."""
        return self.bits[i]

    def submatrix(self, rows: int, cols: int) -> BoolMatrix:
        """Leading ``rows`` x ``cols`` corner."""
        if rows > self.rows or cols > self.cols:
            raise DimensionError("submatrix larger than source")
        dense = self.to_dense()[:rows, :cols]
        return BoolMatrix.from_dense(dense)

    # -- dunder ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BoolMatrix({self.rows}x{self.cols}, {self.count_ones()} ones)"


@dataclass(frozen=True)
class EntryIndex4:
    """Four-index coordinate of an entry of a Kronecker product.

    Bijects with the flat position: row ``ia * rows_b + ib``, column
    ``ja * cols_b + jb``.
    """

    ia: int
    ja: int
    ib: int
    jb: int

    def flat(self, rows_b: int, cols_b: int) -> tuple[int, int]:
        return self.ia * rows_b + self.ib, self.ja * cols_b + self.jb

    @classmethod
    def from_flat(cls, row: int, col: int, rows_b: int, cols_b: int) -> EntryIndex4:
        return cls(row // rows_b, col // cols_b, row % rows_b, col % cols_b)


def _require_same_dims(a: BoolMatrix, b: BoolMatrix) -> None:
    if a.rows != b.rows or a.cols != b.cols:
        raise DimensionError(
            f"dimension mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}"
        )


def boolean_sum(ms: Iterable[BoolMatrix]) -> BoolMatrix:
    """Entrywise OR of equally-sized matrices."""
    ms = list(ms)
    if not ms:
        raise DimensionError("boolean_sum of an empty list")
    first = ms[0]
    acc = first.bits.copy()
    for m in ms[1:]:
        _require_same_dims(first, m)
        np.bitwise_or(acc, m.bits, out=acc)
    return BoolMatrix.from_packed(first.rows, first.cols, acc)


def boolean_product(u: BoolMatrix, v: BoolMatrix) -> BoolMatrix:
    """Matrix product over the Boolean semiring: OR of ANDs."""
    if u.cols != v.rows:
        raise DimensionError(
            f"product dimension mismatch: {u.rows}x{u.cols} times {v.rows}x{v.cols}"
        )
    ud = u.to_dense().astype(np.int64)
    vd = v.to_dense().astype(np.int64)
    return BoolMatrix.from_dense((ud @ vd > 0).astype(np.uint8))


def kronecker(
    a: BoolMatrix, b: BoolMatrix, max_entries: int | None = None
) -> BoolMatrix:
    """Kronecker product; block (i, j) equals ``a[i, j] * b``.

    Refuses results beyond the materialization limit so that callers fall
    back to lazy verification.
    """
    entries = a.rows * b.rows * a.cols * b.cols
    limit = max_entries_limit(max_entries)
    if entries > limit:
        raise MaterializationLimitError(
            f"kronecker result has {entries} entries, limit is {limit}"
        )
    dense = np.kron(a.to_dense(), b.to_dense())
    return BoolMatrix.from_dense(dense)


def dominated_by(m: BoolMatrix, a: BoolMatrix) -> bool:
    """True iff every 1 of ``m`` is a 1 of ``a`` (written m <= a)."""
    _require_same_dims(m, a)
    return not (m.bits & ~a.bits).any()


def is_rank_one(m: BoolMatrix) -> bool:
    """True iff ``m`` is nonzero and its support is a full rectangle.

    Equivalently the support equals (nonzero rows) x (nonzero columns).
    """
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return False
    col_mask = np.bitwise_or.reduce(m.bits, axis=0)
    nonzero = m.bits.any(axis=1)
    return bool(np.array_equal(m.bits[nonzero], np.tile(col_mask, (nonzero.sum(), 1))))


def project_factors(
    m: BoolMatrix, dims_a: tuple[int, int], dims_b: tuple[int, int]
) -> tuple[BoolMatrix, BoolMatrix]:
    """Split a rank-1 submatrix of a Kronecker product into its two factors.

    For ``m`` of Boolean rank 1 living in the index space of A (x) B, returns
    (M_A, M_B) where M_A marks the (ia, ja) blocks touched by ``m`` and M_B
    the (ib, jb) offsets; both are rank 1 and m <= M_A (x) M_B.
    """
    ra, ca = dims_a
    rb, cb = dims_b
    if m.rows != ra * rb or m.cols != ca * cb:
        raise DimensionError(
            f"matrix is {m.rows}x{m.cols}, expected {ra * rb}x{ca * cb}"
        )
    if not is_rank_one(m):
        raise ValueError("project_factors requires a matrix of Boolean rank 1")
    d = m.to_dense().reshape(ra, rb, ca, cb)
    m_a = d.any(axis=(1, 3)).astype(np.uint8)
    m_b = d.any(axis=(0, 2)).astype(np.uint8)
    return BoolMatrix.from_dense(m_a), BoolMatrix.from_dense(m_b)


# -- text format ------------------------------------------------------------

def format_matrix(m: BoolMatrix) -> str:
    """Matrix text format: ``rows cols`` then one 0/1 line per row."""
    lines = [f"{m.rows} {m.cols}"]
    dense = m.to_dense()
    for i in range(m.rows):
        lines.append("".join("1" if x else "0" for x in dense[i]))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> BoolMatrix:
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise FormatError("missing header", line=1)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("header must be 'rows cols'", line=1)
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError("header must hold two decimal integers", line=1) from None
    if rows < 0 or cols < 0:
        raise FormatError("dimensions must be non-negative", line=1)
    if len(lines) < rows + 1:
        raise FormatError(f"expected {rows} row lines", line=len(lines))
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for i in range(rows):
        row = lines[1 + i]
        if len(row) != cols or (row and set(row) - {"0", "1"}):
            raise FormatError(
                f"row must be exactly {cols} characters of 0/1", line=2 + i
            )
        dense[i] = np.frombuffer(row.encode(), dtype=np.uint8) - ord("0")
    for extra, content in enumerate(lines[1 + rows:]):
        if content:
            raise FormatError("trailing content after matrix", line=2 + rows + extra)
    return BoolMatrix.from_dense(dense)


def write_matrix(path: str, m: BoolMatrix) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(m))


def read_matrix(path: str) -> BoolMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())
