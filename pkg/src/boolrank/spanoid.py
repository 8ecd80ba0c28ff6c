"""Spanoids: monotone inference systems generalizing rectangle covers.

A spanoid is a finite universe with reflexive, monotone inference rules
(S, i) read "S spans i"; the span of a set is its derivation closure and
the rank is the smallest spanning set.  The spanoid attached to a 0/1
matrix has the rank-1 submatrices as universe and Boolean-sum domination as
inference; its rank equals the matrix's Boolean rank, and the rank of the
Kronecker-style product of two matrix spanoids equals the Boolean rank of
the matrices' Kronecker product.

Rank search is brute force over subsets in lexicographic order and is
capped (subset size, universe size); these propositions are only checkable
at tiny scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .boolmat import BoolMatrix
from .errors import BudgetExceededError, DimensionError, FormatError

MATRIX_UNIVERSE_CAP = 10_000
PRODUCT_UNIVERSE_CAP = 100
RANK_SIZE_CAP = 6
DEFAULT_SUBSET_BUDGET = 10**7


class Spanoid:
    """Base class: a universe plus an ``infers`` predicate.

    ``infers(S, i)`` must be reflexive (i in S implies True) and monotone in
    S; :meth:`span` computes the least fixed point, which monotonicity makes
    independent of the order elements are added in.
    """

    universe: tuple

    def __len__(self) -> int:
        return len(self.universe)

    def infers(self, subset: frozenset[int], i: int) -> bool:
        raise NotImplementedError

    def span(self, t: Iterable[int]) -> frozenset[int]:
        current = set(t)
        for i in current:
            if not 0 <= i < len(self.universe):
                raise DimensionError(f"element {i} outside universe")
        changed = True
        while changed:
            changed = False
            for i in range(len(self.universe)):
                if i not in current and self.infers(current, i):
                    current.add(i)
                    changed = True
        return frozenset(current)

    def spans_all(self, t: Iterable[int]) -> bool:
        return len(self.span(t)) == len(self.universe)


class RuleSpanoid(Spanoid):
    """A spanoid given by an explicit rule list over universe 0..u-1."""

    def __init__(self, size: int, rules: Sequence[tuple[frozenset[int], int]]):
        if size < 0:
            raise DimensionError("universe size must be non-negative")
        self.universe = tuple(range(size))
        self.rules = tuple((frozenset(s), i) for s, i in rules)
        for s, i in self.rules:
            if not 0 <= i < size or any(not 0 <= x < size for x in s):
                raise DimensionError(f"rule ({sorted(s)}, {i}) outside universe")
        self._by_target: dict[int, list[frozenset[int]]] = {}
        for s, i in self.rules:
            self._by_target.setdefault(i, []).append(s)

    def infers(self, subset: frozenset[int], i: int) -> bool:
        if i in subset:
            return True
        return any(req <= subset for req in self._by_target.get(i, ()))


class MatrixSpanoid(Spanoid):
    """The spanoid of a 0/1 matrix: rank-1 submatrices under sum domination.

    The universe enumerates all nonempty all-ones (row set, column set)
    pairs dominated by the matrix, in colex order of the index bitmasks, and
    in particular contains every single-1 matrix on the support.
    """

    def __init__(self, matrix: BoolMatrix, cap: int = MATRIX_UNIVERSE_CAP):
        self.matrix = matrix
        r, c = matrix.rows, matrix.cols
        dense = matrix.to_dense()
        row_bits = []
        for i in range(r):
            m = 0
            for j in np.nonzero(dense[i])[0]:
                m |= 1 << int(j)
            row_bits.append(m)
        elems: list[tuple[int, int]] = []
        masks: list[int] = []
        for rowmask in range(1, 1 << r):
            allowed = (1 << c) - 1
            rm = rowmask
            while rm and allowed:
                low = rm & -rm
                allowed &= row_bits[low.bit_length() - 1]
                rm ^= low
            if not allowed:
                continue
            # nonempty submasks of `allowed` in increasing (= colex) order
            for colmask in range(1, allowed + 1):
                if colmask & ~allowed:
                    continue
                if len(elems) >= cap:
                    raise BudgetExceededError(
                        f"matrix spanoid universe exceeds cap {cap}"
                    )
                entry = 0
                rm = rowmask
                while rm:
                    low = rm & -rm
                    entry |= colmask << ((low.bit_length() - 1) * c)
                    rm ^= low
                elems.append((rowmask, colmask))
                masks.append(entry)
        self.universe = tuple(elems)
        self.entry_masks = tuple(masks)
        self.support_mask = 0
        for i in range(r):
            self.support_mask |= row_bits[i] << (i * c)

    def infers(self, subset: frozenset[int], i: int) -> bool:
        acc = 0
        for t in subset:
            acc |= self.entry_masks[t]
        return self.entry_masks[i] & ~acc == 0

    def span(self, t: Iterable[int]) -> frozenset[int]:
        # adding a dominated element never grows the Boolean sum, so the
        # closure is a single domination filter
        acc = 0
        for i in t:
            acc |= self.entry_masks[i]
        return frozenset(
            i for i, m in enumerate(self.entry_masks) if m & ~acc == 0
        )

    def spans_all(self, t: Iterable[int]) -> bool:
        acc = 0
        for i in t:
            acc |= self.entry_masks[i]
        return acc == self.support_mask

    def element_matrix(self, i: int) -> BoolMatrix:
        rowmask, colmask = self.universe[i]
        dense = np.zeros((self.matrix.rows, self.matrix.cols), dtype=np.uint8)
        rows = [b for b in range(self.matrix.rows) if rowmask >> b & 1]
        cols = [b for b in range(self.matrix.cols) if colmask >> b & 1]
        dense[np.ix_(rows, cols)] = 1
        return BoolMatrix.from_dense(dense)


class ProductSpanoid(Spanoid):
    """The Kronecker-style product: universe U1 x U2 with the two lifted
    rule schemas (a rule of either component fires along a fixed other
    coordinate)."""

    def __init__(self, s1: Spanoid, s2: Spanoid):
        self.s1 = s1
        self.s2 = s2
        self.n2 = len(s2.universe)
        self.universe = tuple(
            (i, j) for i in range(len(s1.universe)) for j in range(len(s2.universe))
        )

    def infers(self, subset: frozenset[int], idx: int) -> bool:
        if idx in subset:
            return True
        i, j = divmod(idx, self.n2)
        proj1 = frozenset(s // self.n2 for s in subset if s % self.n2 == j)
        if self.s1.infers(proj1, i):
            return True
        proj2 = frozenset(s % self.n2 for s in subset if s // self.n2 == i)
        return self.s2.infers(proj2, j)

    def pair_index(self, i: int, j: int) -> int:
        return i * self.n2 + j


def product_spanoid(s1: Spanoid, s2: Spanoid) -> ProductSpanoid:
    return ProductSpanoid(s1, s2)


def span(s: Spanoid, t: Iterable[int]) -> frozenset[int]:
    return s.span(t)


@dataclass(frozen=True)
class RankResult:
    value: int
    witness: tuple[int, ...]


def spanoid_rank(
    s: Spanoid,
    max_size: int = RANK_SIZE_CAP,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
) -> RankResult:
    """Smallest spanning set by subset search in lexicographic order.

    Searches sizes 0, 1, ... up to ``max_size`` and raises when the caps or
    the subset budget are exhausted before an answer is proven.
    """
    n = len(s.universe)
    if isinstance(s, ProductSpanoid) and n > PRODUCT_UNIVERSE_CAP:
        raise BudgetExceededError(
            f"product universe {n} exceeds cap {PRODUCT_UNIVERSE_CAP}"
        )
    examined = 0
    for size in range(0, min(n, max_size) + 1):
        for cand in combinations(range(n), size):
            examined += 1
            if examined > subset_budget:
                raise BudgetExceededError(
                    f"rank search exceeded {subset_budget} subsets"
                )
            if s.spans_all(cand):
                return RankResult(size, cand)
    raise BudgetExceededError(f"no spanning set of size <= {max_size} found")


@dataclass(frozen=True)
class ProductBoundResult:
    """Outcome of the product-rank upper-bound check.

    ``ok`` requires the per-element hypothesis and the final spanning check;
    ``bound`` is the certified sum of |M_t| * |N_t|.
    """

    ok: bool
    bound: int | None
    witness: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_product_bound(
    s1: Spanoid,
    s2: Spanoid,
    m_sets: Sequence[Iterable[int]],
    n_sets: Sequence[Iterable[int]],
) -> ProductBoundResult:
    """Verify the spanoid composition hypothesis and certify the bound.

    Requires, for every i in U1, that the union of the N_t with i in M_t
    spans U2; on success additionally verifies that the union of the
    M_t x N_t products spans U1 x U2 and returns sum |M_t| |N_t|.
    """
    if len(m_sets) != len(n_sets):
        raise DimensionError("set lists must have equal length")
    m_sets = [frozenset(m) for m in m_sets]
    n_sets = [frozenset(nn) for nn in n_sets]
    for m in m_sets:
        if any(not 0 <= x < len(s1.universe) for x in m):
            raise DimensionError("m-set element outside first universe")
    for nn in n_sets:
        if any(not 0 <= x < len(s2.universe) for x in nn):
            raise DimensionError("n-set element outside second universe")

    for i in range(len(s1.universe)):
        union: set[int] = set()
        for m, nn in zip(m_sets, n_sets):
            if i in m:
                union |= nn
        if not s2.spans_all(union):
            return ProductBoundResult(False, None, witness=i)

    prod = ProductSpanoid(s1, s2)
    big = {
        prod.pair_index(i, j)
        for m, nn in zip(m_sets, n_sets)
        for i in m
        for j in nn
    }
    if not prod.spans_all(big):
        return ProductBoundResult(False, None, witness=None)
    bound = sum(len(m) * len(nn) for m, nn in zip(m_sets, n_sets))
    return ProductBoundResult(True, bound)


# -- text formats ---------------------------------------------------------------

def format_rule_spanoid(s: RuleSpanoid) -> str:
    lines = [f"SPANOID {len(s.universe)} {len(s.rules)}"]
    for req, tgt in s.rules:
        prem = ",".join(str(x) for x in sorted(req))
        lines.append(f"S: {prem} -> {tgt}")
    return "\n".join(lines) + "\n"


def parse_spanoid(text: str) -> RuleSpanoid:
    lines = text.split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty spanoid file", line=1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "SPANOID":
        raise FormatError("expected 'SPANOID u r'", line=1)
    try:
        u, r = int(head[1]), int(head[2])
    except ValueError:
        raise FormatError("header fields must be integers", line=1) from None
    if len(lines) != r + 1:
        raise FormatError(f"expected {r} rule lines", line=len(lines))
    rules = []
    for idx in range(r):
        line = lines[1 + idx]
        lineno = 2 + idx
        if not line.startswith("S:") or "->" not in line:
            raise FormatError("expected 'S: i1,...,ik -> j'", line=lineno)
        left, _, right = line[2:].partition("->")
        try:
            prem = frozenset(
                int(x) for x in left.strip().split(",") if x.strip() != ""
            )
            tgt = int(right.strip())
        except ValueError:
            raise FormatError("rule indices must be integers", line=lineno) from None
        rules.append((prem, tgt))
    return RuleSpanoid(u, rules)


def read_spanoid(path: str) -> Spanoid:
    """Read a SPANOID rule file or a MATSPANOID matrix reference."""
    import os

    from .boolmat import read_matrix

    with open(path) as fh:
        text = fh.read()
    stripped = text.strip()
    if stripped.startswith("MATSPANOID"):
        parts = stripped.split(None, 1)
        if len(parts) != 2:
            raise FormatError("expected 'MATSPANOID <matrix-file>'", line=1)
        ref = parts[1].strip()
        base = os.path.dirname(os.path.abspath(path))
        return MatrixSpanoid(read_matrix(os.path.join(base, ref)))
    return parse_spanoid(text)


def parse_index_sets(text: str) -> list[frozenset[int]]:
    """SETS format: 'SETS s' then s lines of comma-separated indices
    (an empty line is the empty set)."""
    lines = text.split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty sets file", line=1)
    head = lines[0].split()
    if len(head) != 2 or head[0] != "SETS":
        raise FormatError("expected 'SETS s'", line=1)
    try:
        s = int(head[1])
    except ValueError:
        raise FormatError("header count must be an integer", line=1) from None
    if len(lines) != s + 1:
        raise FormatError(f"expected {s} set lines", line=len(lines))
    out = []
    for idx in range(s):
        token = lines[1 + idx].strip()
        try:
            out.append(
                frozenset(int(x) for x in token.split(",") if x.strip() != "")
            )
        except ValueError:
            raise FormatError(f"bad set {token!r}", line=2 + idx) from None
    return out


def read_index_sets(path: str) -> list[frozenset[int]]:
    with open(path) as fh:
        return parse_index_sets(fh.read())
