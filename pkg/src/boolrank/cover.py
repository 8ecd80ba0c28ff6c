"""Rectangle covers: certificates, verification, and Kronecker composition.

A :class:`Cover` lists all-ones rectangles whose union must equal the
support of a target matrix.  Covers of two factors compose into a cover
of their Kronecker product; the composition hypotheses can be
verified *lazily* (without materializing the product) by grouping the
product's entries by the subset of family members covering them, which is
what makes crown-matrix instances with ~5e7-square products checkable.

Every failed verification reports the first failing entry in row-major
order (or the lexicographically first failing subset), so tests and CLI
output are deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

from .boolmat import BoolMatrix, boolean_sum, kronecker, max_entries_limit
from .errors import DimensionError, VerificationError


@dataclass(frozen=True)
class Rectangle:
    """A rank-1 cover element: (row index set) x (column index set)."""

    row_set: tuple[int, ...]
    col_set: tuple[int, ...]

    def __post_init__(self):
        for name, idx in (("row_set", self.row_set), ("col_set", self.col_set)):
            if not idx:
                raise ValueError(f"rectangle {name} must be nonempty")
            if any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 0:
                raise ValueError(f"rectangle {name} must be sorted distinct >= 0")

    @property
    def area(self) -> int:
        return len(self.row_set) * len(self.col_set)

    def to_matrix(self, rows: int, cols: int) -> BoolMatrix:
        return rectangle_matrix(self, rows, cols)


def rectangle_matrix(rect: Rectangle, rows: int, cols: int) -> BoolMatrix:
    if rect.row_set[-1] >= rows or rect.col_set[-1] >= cols:
        raise DimensionError(f"rectangle exceeds {rows}x{cols} target")
    ind = np.zeros(cols, dtype=np.uint8)
    ind[list(rect.col_set)] = 1
    col_mask = np.packbits(ind, bitorder="little")
    bits = np.zeros((rows, (cols + 7) // 8), dtype=np.uint8)
    bits[list(rect.row_set)] = col_mask
    return BoolMatrix.from_packed(rows, cols, bits)


@dataclass(frozen=True)
class Cover:
    """An ordered list of rectangles certifying a cover of a rows x cols target."""

    rows: int
    cols: int
    rects: tuple[Rectangle, ...]

    def __post_init__(self):
        for r in self.rects:
            if r.row_set[-1] >= self.rows or r.col_set[-1] >= self.cols:
                raise DimensionError(
                    f"rectangle index out of range for {self.rows}x{self.cols}"
                )

    @property
    def size(self) -> int:
        return len(self.rects)


def cover_matrix(c: Cover) -> BoolMatrix:
    """Boolean sum of the cover's rectangles."""
    bits = np.zeros((c.rows, (c.cols + 7) // 8), dtype=np.uint8)
    for rect in c.rects:
        ind = np.zeros(c.cols, dtype=np.uint8)
        ind[list(rect.col_set)] = 1
        col_mask = np.packbits(ind, bitorder="little")
        bits[list(rect.row_set)] |= col_mask
    return BoolMatrix.from_packed(c.rows, c.cols, bits)


@dataclass(frozen=True)
class MatrixFamily:
    """Equally-sized matrices, optionally with rank-1 decompositions.

    When decompositions are present, each member must equal the Boolean sum
    of its rectangles (validated on construction).
    """

    members: tuple[BoolMatrix, ...]
    decompositions: tuple[Cover, ...] | None = None

    def __post_init__(self):
        if not self.members:
            raise DimensionError("family must be nonempty")
        r, c = self.members[0].rows, self.members[0].cols
        for m in self.members:
            if (m.rows, m.cols) != (r, c):
                raise DimensionError("family members must share dimensions")
        if self.decompositions is not None:
            if len(self.decompositions) != len(self.members):
                raise DimensionError("one decomposition per member required")
            for m, d in zip(self.members, self.decompositions):
                if (d.rows, d.cols) != (r, c):
                    raise DimensionError("decomposition dimensions mismatch")
                if cover_matrix(d) != m:
                    raise ValueError(
                        "decomposition does not reproduce its family member"
                    )

    def __len__(self) -> int:
        return len(self.members)

    @property
    def dims(self) -> tuple[int, int]:
        return self.members[0].rows, self.members[0].cols

    def ranks(self) -> tuple[int, ...]:
        """Decomposition sizes (upper bounds on the members' Boolean ranks)."""
        if self.decompositions is None:
            raise ValueError("family carries no decompositions")
        return tuple(d.size for d in self.decompositions)


def family_sum(fam: MatrixFamily) -> BoolMatrix:
    return boolean_sum(fam.members)


# -- results ----------------------------------------------------------------

@dataclass(frozen=True)
class VerifyResult:
    """Outcome of a verification; falsy iff it failed.

    ``witness`` is the first failing entry (i, j) in row-major order.
    """

    ok: bool
    witness: tuple[int, int] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SubsetCheckResult:
    """Outcome of a q-out-of-s covering check.

    ``exhaustive`` is False when the subset space exceeded the budget and
    seeded sampling was used instead; ``witness`` is the first failing
    subset (member indices) found.
    """

    ok: bool
    exhaustive: bool
    checked: int
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _first_set_bit(diff: np.ndarray, cols: int) -> tuple[int, int]:
    """Row-major position of the first set bit in a packed 2-D buffer."""
    rows_nz = np.nonzero(diff.any(axis=1))[0]
    i = int(rows_nz[0])
    byte_idx = int(np.nonzero(diff[i])[0][0])
    byte = int(diff[i, byte_idx])
    j = byte_idx * 8 + (byte & -byte).bit_length() - 1
    if j >= cols:  # cannot happen with zeroed padding; guard anyway
        raise AssertionError("set bit in padding")
    return i, j


def verify_cover(a: BoolMatrix, c: Cover) -> VerifyResult:
    """Check that the rectangles are all-ones in ``a`` and cover its support."""
    if (a.rows, a.cols) != (c.rows, c.cols):
        raise DimensionError(
            f"cover is {c.rows}x{c.cols}, target is {a.rows}x{a.cols}"
        )
    union = cover_matrix(c)
    over = union.bits & ~a.bits
    under = a.bits & ~union.bits
    bad = over | under
    if not bad.any():
        return VerifyResult(True)
    i, j = _first_set_bit(bad, a.cols)
    if (over[i, j >> 3] >> (j & 7)) & 1:
        return VerifyResult(False, (i, j), "rectangle covers a zero entry")
    return VerifyResult(False, (i, j), "uncovered one entry")


# -- lazy hypothesis verification --------------------------------------------

_BLOCK_ENTRIES = 1 << 22


def _signature_blocks(
    a: BoolMatrix, members: Sequence[BoolMatrix]
) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (row0, ones_mask, signatures) per row block.

    ``signatures`` has shape (block_rows, cols, planes); bit t of the
    flattened planes marks that member t covers the entry.  Up to 64 members
    fit one plane.
    """
    s = len(members)
    planes = (s + 63) // 64
    block = max(1, _BLOCK_ENTRIES // max(1, a.cols))
    for row0 in range(0, a.rows, block):
        row1 = min(a.rows, row0 + block)
        ones = np.unpackbits(
            a.bits[row0:row1], axis=1, bitorder="little", count=a.cols
        ).astype(bool)
        sig = np.zeros((row1 - row0, a.cols, planes), dtype=np.uint64)
        for t, m in enumerate(members):
            mb = np.unpackbits(
                m.bits[row0:row1], axis=1, bitorder="little", count=a.cols
            ).astype(np.uint64)
            sig[:, :, t >> 6] |= mb << np.uint64(t & 63)
        yield row0, ones, sig


def _present_signatures(a: BoolMatrix, members: Sequence[BoolMatrix]) -> set[tuple[int, ...]]:
    """Distinct member-coverage signatures over the 1-entries of ``a``."""
    s = len(members)
    seen: set[tuple[int, ...]] = set()
    if s <= 16:
        # histogram over the (at most 2^16) possible signatures: no sorting
        counts = np.zeros(1 << s, dtype=np.int64)
        for _, ones, sig in _signature_blocks(a, members):
            if ones.any():
                counts += np.bincount(
                    sig[:, :, 0][ones].astype(np.int64), minlength=1 << s
                )
        for value in np.nonzero(counts)[0]:
            seen.add((int(value),))
        return seen
    for _, ones, sig in _signature_blocks(a, members):
        if not ones.any():
            continue
        sel = sig[ones]
        if sig.shape[2] == 1:
            for value in np.unique(sel[:, 0]):
                seen.add((int(value),))
        else:
            for row in np.unique(sel, axis=0):
                seen.add(tuple(int(x) for x in row))
    return seen


def verify_kron_hypotheses(
    a: BoolMatrix,
    m_fam: MatrixFamily,
    b: BoolMatrix,
    n_fam: MatrixFamily,
) -> VerifyResult:
    """Verify the composition hypotheses for covering ``a (x) b``.

    True iff ``m_fam`` covers ``a`` and, for every (i, j) with a[i, j] = 1,
    the members of ``n_fam`` positionally matching the m-members that cover
    (i, j) form a cover of ``b``.  This certifies the composed cover of the
    product without materializing it: entries are grouped by their coverage
    signature and only the distinct signatures are checked against ``b``.
    """
    if len(m_fam) != len(n_fam):
        raise DimensionError("families must have equal length")
    if m_fam.dims != (a.rows, a.cols):
        raise DimensionError("m-family dimensions do not match the first factor")
    if n_fam.dims != (b.rows, b.cols):
        raise DimensionError("n-family dimensions do not match the second factor")

    union = family_sum(m_fam)
    if union != a:
        bad = union.bits ^ a.bits
        i, j = _first_set_bit(bad, a.cols)
        return VerifyResult(False, (i, j), "m-family does not cover the first factor")

    s = len(m_fam)
    seen = _present_signatures(a, m_fam.members)

    failing: set[tuple[int, ...]] = set()
    for sig_key in sorted(seen):
        selected = [
            t for t in range(s) if (sig_key[t >> 6] >> (t & 63)) & 1
        ]
        # signature 0 cannot occur: m_fam covers a exactly.
        if boolean_sum([n_fam.members[t] for t in selected]) != b:
            failing.add(sig_key)

    if not failing:
        return VerifyResult(True)

    for row0, ones, sig in _signature_blocks(a, m_fam.members):
        flat_sig = sig.reshape(-1, sig.shape[2])
        flat_ones = ones.reshape(-1)
        for pos in np.nonzero(flat_ones)[0]:
            if tuple(int(x) for x in flat_sig[pos]) in failing:
                i, j = divmod(int(pos), a.cols)
                return VerifyResult(
                    False,
                    (row0 + i, j),
                    "selected n-members do not cover the second factor",
                )
    raise AssertionError("failing signature disappeared on rescan")


def compose_kron_cover(m_fam: MatrixFamily, n_fam: MatrixFamily) -> Cover:
    """Build the product cover out of two families with decompositions.

    The families must satisfy the composition hypotheses for the matrices
    they cover (the Boolean sums of the families); rectangles are emitted
    as all products of the t-th decompositions, t-major.
    """
    if m_fam.decompositions is None or n_fam.decompositions is None:
        raise ValueError("both families must carry rank-1 decompositions")
    a = family_sum(m_fam)
    b = family_sum(n_fam)
    res = verify_kron_hypotheses(a, m_fam, b, n_fam)
    if not res:
        raise VerificationError(
            f"composition hypotheses fail at entry {res.witness}: {res.reason}",
            witness=res.witness,
        )
    rb, cb = b.rows, b.cols
    rects = []
    for dm, dn in zip(m_fam.decompositions, n_fam.decompositions):
        for rm in dm.rects:
            row_a = np.array(rm.row_set) * rb
            col_a = np.array(rm.col_set) * cb
            for rn in dn.rects:
                rows = (row_a[:, None] + np.array(rn.row_set)).ravel()
                cols = (col_a[:, None] + np.array(rn.col_set)).ravel()
                rects.append(
                    Rectangle(tuple(int(x) for x in rows), tuple(int(x) for x in cols))
                )
    return Cover(a.rows * rb, a.cols * cb, tuple(rects))


def best_triple_pairing(
    m_fam: MatrixFamily, n_fam: MatrixFamily
) -> tuple[MatrixFamily, int]:
    """Reorder a length-3 n-family to minimize the composed-cover size.

    Enumerates the six pairings and returns the reordered family together
    with the achieved bound a1*b1 + a2*b2 + a3*b3; ties break on the
    lexicographically smallest permutation.  Families are never reordered
    implicitly anywhere else.
    """
    if len(m_fam) != 3 or len(n_fam) != 3:
        raise DimensionError("pairing helper requires two length-3 families")
    a_sizes = m_fam.ranks()
    b_sizes = n_fam.ranks()
    best_perm = min(
        permutations(range(3)),
        key=lambda p: (sum(a_sizes[t] * b_sizes[p[t]] for t in range(3)), p),
    )
    bound = sum(a_sizes[t] * b_sizes[best_perm[t]] for t in range(3))
    reordered = MatrixFamily(
        tuple(n_fam.members[p] for p in best_perm),
        tuple(n_fam.decompositions[p] for p in best_perm)
        if n_fam.decompositions is not None
        else None,
    )
    return reordered, bound


# -- q-out-of-s covering ------------------------------------------------------

DEFAULT_SUBSET_BUDGET = 10**6


def check_q_covering(
    a: BoolMatrix,
    fam: MatrixFamily,
    q: int,
    budget: int | None = DEFAULT_SUBSET_BUDGET,
    seed: int = 0,
) -> SubsetCheckResult:
    """Check that every q-subset of the family sums to ``a``.

    Runs exhaustively in lexicographic subset order when C(s, q) fits the
    budget, otherwise checks ``budget`` seeded-random subsets and reports
    the result as non-exhaustive.
    """
    s = len(fam)
    if not 1 <= q <= s:
        raise DimensionError(f"q={q} outside 1..{s}")
    if fam.dims != (a.rows, a.cols):
        raise DimensionError("family dimensions do not match the target")
    total = math.comb(s, q)
    bits = [m.bits for m in fam.members]
    target = a.bits

    if budget is None or total <= budget:
        checked = 0
        chosen: list[int] = []

        def rec(start: int, acc: np.ndarray) -> tuple[int, ...] | None:
            nonlocal checked
            if len(chosen) == q:
                checked += 1
                if np.array_equal(acc, target):
                    return None
                return tuple(chosen)
            if np.array_equal(acc, target):
                # every completion already covers; count and skip them
                checked += math.comb(s - start, q - len(chosen))
                return None
            for t in range(start, s - (q - len(chosen)) + 1):
                chosen.append(t)
                witness = rec(t + 1, acc | bits[t])
                chosen.pop()
                if witness is not None:
                    return witness
            return None

        witness = rec(0, np.zeros_like(target))
        return SubsetCheckResult(witness is None, True, checked, witness)

    rng = random.Random(seed)
    for trial in range(budget):
        subset = tuple(sorted(rng.sample(range(s), q)))
        acc = bits[subset[0]].copy()
        for t in subset[1:]:
            acc |= bits[t]
        if not np.array_equal(acc, target):
            return SubsetCheckResult(False, False, trial + 1, subset)
    return SubsetCheckResult(True, False, budget, None)


def check_half_covering(a: BoolMatrix, fam: MatrixFamily) -> SubsetCheckResult:
    """Check that every ceil(s/2)-subset of the family covers ``a`` (exhaustive)."""
    q = (len(fam) + 1) // 2
    return check_q_covering(a, fam, q, budget=None)


# -- family extraction --------------------------------------------------------

def _all_ones_on(m: BoolMatrix, rows: Sequence[int], cols: Sequence[int]) -> bool:
    ind = np.zeros(m.cols, dtype=np.uint8)
    ind[list(cols)] = 1
    col_mask = np.packbits(ind, bitorder="little")
    sub = m.bits[list(rows)]
    return not (col_mask & ~sub).any()


def extract_families(
    a: BoolMatrix,
    b: BoolMatrix,
    c: Cover,
    max_entries: int | None = None,
) -> tuple[MatrixFamily, MatrixFamily]:
    """Project a cover of ``a (x) b`` into two rank-1 families.

    Each rectangle P_t splits by index arithmetic into factors (M_t, N_t)
    with P_t <= M_t (x) N_t (the same split the four-index projection
    produces).  The returned families always satisfy the composition
    hypotheses when the input is a valid cover; this is re-verified and a
    :class:`VerificationError` raised otherwise.

    The input cover is verified eagerly when the product is materializable.
    Above the limit only the per-rectangle all-ones checks plus the
    extracted-family hypotheses are run; at that scale an input whose
    rectangles are valid but whose union falls short of the product's
    support is not detectable entry-by-entry.
    """
    rb, cb = b.rows, b.cols
    if c.rows != a.rows * rb or c.cols != a.cols * cb:
        raise DimensionError("cover dimensions do not match the product")

    entries = c.rows * c.cols
    if entries <= max_entries_limit(max_entries):
        res = verify_cover(kronecker(a, b, max_entries), c)
        if not res:
            raise VerificationError(
                f"input cover invalid at entry {res.witness}: {res.reason}",
                witness=res.witness,
            )

    members_a, decomps_a, members_b, decomps_b = [], [], [], []
    for rect in c.rects:
        rows_a = tuple(sorted({r // rb for r in rect.row_set}))
        cols_a = tuple(sorted({x // cb for x in rect.col_set}))
        rows_b = tuple(sorted({r % rb for r in rect.row_set}))
        cols_b = tuple(sorted({x % cb for x in rect.col_set}))
        if not _all_ones_on(a, rows_a, cols_a) or not _all_ones_on(b, rows_b, cols_b):
            raise VerificationError(
                "input cover invalid: a rectangle covers a zero entry",
                witness=rect,
            )
        ra_rect = Rectangle(rows_a, cols_a)
        rb_rect = Rectangle(rows_b, cols_b)
        members_a.append(rectangle_matrix(ra_rect, a.rows, a.cols))
        decomps_a.append(Cover(a.rows, a.cols, (ra_rect,)))
        members_b.append(rectangle_matrix(rb_rect, b.rows, b.cols))
        decomps_b.append(Cover(b.rows, b.cols, (rb_rect,)))

    m_fam = MatrixFamily(tuple(members_a), tuple(decomps_a))
    n_fam = MatrixFamily(tuple(members_b), tuple(decomps_b))
    res = verify_kron_hypotheses(a, m_fam, b, n_fam)
    if not res:
        raise VerificationError(
            f"input cover invalid (hypotheses fail at {res.witness}): {res.reason}",
            witness=res.witness,
        )
    return m_fam, n_fam


# -- text formats -------------------------------------------------------------

def _format_index_set(idx: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in idx)


def format_cover(c: Cover) -> str:
    lines = [f"COVER {c.rows} {c.cols} {c.size}"]
    for r in c.rects:
        lines.append(f"R {_format_index_set(r.row_set)} C {_format_index_set(r.col_set)}")
    return "\n".join(lines) + "\n"


def _parse_index_set(token: str, lineno: int) -> tuple[int, ...]:
    from .errors import FormatError

    try:
        idx = tuple(int(x) for x in token.split(","))
    except ValueError:
        raise FormatError(f"bad index list {token!r}", line=lineno) from None
    if any(b <= a for a, b in zip(idx, idx[1:])) or (idx and idx[0] < 0):
        raise FormatError("indices must be sorted, distinct, 0-based", line=lineno)
    return idx


def _parse_cover_lines(lines: list[str], start: int) -> tuple[Cover, int]:
    from .errors import FormatError

    head = lines[start].split()
    if len(head) != 4 or head[0] != "COVER":
        raise FormatError("expected 'COVER rows cols s'", line=start + 1)
    try:
        rows, cols, s = int(head[1]), int(head[2]), int(head[3])
    except ValueError:
        raise FormatError("COVER header fields must be integers", line=start + 1) from None
    rects = []
    for t in range(s):
        lineno = start + 1 + t
        if lineno >= len(lines):
            raise FormatError("unexpected end of cover block", line=lineno + 1)
        parts = lines[lineno].split()
        if len(parts) != 4 or parts[0] != "R" or parts[2] != "C":
            raise FormatError("expected 'R i1,i2,... C j1,j2,...'", line=lineno + 1)
        rects.append(
            Rectangle(
                _parse_index_set(parts[1], lineno + 1),
                _parse_index_set(parts[3], lineno + 1),
            )
        )
    return Cover(rows, cols, tuple(rects)), start + 1 + s


def parse_cover(text: str) -> Cover:
    from .errors import FormatError

    lines = [ln for ln in text.split("\n")]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty cover file", line=1)
    cover, end = _parse_cover_lines(lines, 0)
    if end != len(lines):
        raise FormatError("trailing content after cover", line=end + 1)
    return cover


def format_family(fam: MatrixFamily) -> str:
    if fam.decompositions is None:
        raise ValueError("family format requires rank-1 decompositions")
    r, c = fam.dims
    chunks = [f"FAMILY {r} {c} {len(fam)}\n"]
    for d in fam.decompositions:
        chunks.append(format_cover(d))
    return "".join(chunks)


def parse_family(text: str) -> MatrixFamily:
    from .errors import FormatError

    lines = text.split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty family file", line=1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "FAMILY":
        raise FormatError("expected 'FAMILY rows cols s'", line=1)
    try:
        rows, cols, s = int(head[1]), int(head[2]), int(head[3])
    except ValueError:
        raise FormatError("FAMILY header fields must be integers", line=1) from None
    covers = []
    pos = 1
    for _ in range(s):
        if pos >= len(lines):
            raise FormatError("unexpected end of family file", line=pos + 1)
        cov, pos = _parse_cover_lines(lines, pos)
        if (cov.rows, cov.cols) != (rows, cols):
            raise FormatError("member cover dimensions mismatch family header", line=pos)
        covers.append(cov)
    if pos != len(lines):
        raise FormatError("trailing content after family", line=pos + 1)
    members = tuple(cover_matrix(c) for c in covers)
    return MatrixFamily(members, tuple(covers))


def write_cover(path: str, c: Cover) -> None:
    with open(path, "w") as fh:
        fh.write(format_cover(c))


def read_cover(path: str) -> Cover:
    with open(path) as fh:
        return parse_cover(fh.read())


def write_family(path: str, fam: MatrixFamily) -> None:
    with open(path, "w") as fh:
        fh.write(format_family(fam))


def read_family(path: str) -> MatrixFamily:
    with open(path) as fh:
        return parse_family(fh.read())
