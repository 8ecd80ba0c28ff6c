"""Exact Boolean rank at small scale, isolation sets, and product lower bounds.

The exact rank is NP-hard in general; this solver enumerates the maximal
all-ones rectangles (closing the row supports under intersection) and runs
an iterative-deepening branch and bound over them, so it doubles as the
verification oracle for the closed-form crown rank.  Everything is
deterministic: rectangles are ordered by descending area then
lexicographically, the lexicographically first uncovered entry is branched
on, and ties in witnesses resolve to the smallest.

Lower bounds never round: ratios are exact fractions and ceilings exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolmat import BoolMatrix
from .cover import Cover, Rectangle, verify_cover
from .crown import crown_matrix, sigma
from .errors import BudgetExceededError

DEFAULT_RECTANGLE_CAP = 200_000
DEFAULT_NODE_BUDGET = 20_000_000


def _row_masks(a: BoolMatrix) -> list[int]:
    dense = a.to_dense()
    out = []
    for i in range(a.rows):
        m = 0
        for j in np.nonzero(dense[i])[0]:
            m |= 1 << int(j)
        out.append(m)
    return out


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def maximal_rectangles(
    a: BoolMatrix, cap: int = DEFAULT_RECTANGLE_CAP
) -> list[Rectangle]:
    """All maximal all-ones rectangles of ``a``.

    Closes the set of row supports under pairwise intersection (every
    maximal rectangle's column set is an intersection of row supports) and
    maps each closed column set to the full set of rows containing it.
    """
    row_masks = _row_masks(a)
    base = sorted({m for m in row_masks if m})
    closed = set(base)
    frontier = list(base)
    while frontier:
        fresh = []
        for y in frontier:
            for b in base:
                z = y & b
                if z and z not in closed:
                    closed.add(z)
                    fresh.append(z)
        if len(closed) > cap:
            raise BudgetExceededError(
                f"more than {cap} closed column sets while enumerating rectangles"
            )
        frontier = fresh
    rects = []
    for y in sorted(closed):
        rows = tuple(i for i, rm in enumerate(row_masks) if rm & y == y)
        rects.append(Rectangle(rows, _mask_to_tuple(y)))
    return rects


def is_crown(a: BoolMatrix) -> bool:
    return a.rows == a.cols and a.rows >= 1 and a == crown_matrix(a.rows)


@dataclass(frozen=True)
class RankCertificate:
    """Exact value (when determined) plus its two-sided witnesses.

    ``upper`` always verifies against the input; ``lower`` is what the
    search proved (kind "search"), and equals the upper size iff ``exact``.
    """

    value: int | None
    upper: Cover
    lower: int
    lower_kind: str
    exact: bool


def _entry_bits(a: BoolMatrix) -> tuple[dict[tuple[int, int], int], list[tuple[int, int]]]:
    entries = []
    dense = a.to_dense()
    for i in range(a.rows):
        for j in np.nonzero(dense[i])[0]:
            entries.append((i, int(j)))
    return {e: b for b, e in enumerate(entries)}, entries


def exact_boolean_rank(
    a: BoolMatrix,
    limit: int | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    rectangle_cap: int = DEFAULT_RECTANGLE_CAP,
) -> RankCertificate:
    """Exact minimum rectangle cover by iterative-deepening branch and bound.

    With ``limit`` the search may stop early: it either determines the exact
    value or proves no cover smaller than ``limit`` exists ("\\u2265 limit"
    certificate).  Exceeding the node budget raises; a wrong exact value is
    never returned.
    """
    if a.is_zero():
        empty = Cover(a.rows, a.cols, ())
        return RankCertificate(0, empty, 0, "search", True)

    rects = maximal_rectangles(a, rectangle_cap)
    ordering = sorted(
        range(len(rects)),
        key=lambda t: (-rects[t].area, rects[t].row_set, rects[t].col_set),
    )
    rects = [rects[t] for t in ordering]

    bit_of, entries = _entry_bits(a)
    universe = (1 << len(entries)) - 1
    masks = []
    for r in rects:
        m = 0
        for i in r.row_set:
            for j in r.col_set:
                m |= 1 << bit_of[(i, j)]
        masks.append(m)
    by_bit: list[list[int]] = [[] for _ in entries]
    for t, m in enumerate(masks):
        mm = m
        while mm:
            low = mm & -mm
            by_bit[low.bit_length() - 1].append(t)
            mm ^= low

    # greedy upper bound (ties to the earliest rectangle in the ordering)
    covered = 0
    greedy: list[int] = []
    while covered != universe:
        best_t, best_gain = -1, 0
        for t, m in enumerate(masks):
            gain = (m & ~covered).bit_count()
            if gain > best_gain:
                best_gain, best_t = gain, t
        greedy.append(best_t)
        covered |= masks[best_t]
    ub = len(greedy)
    ub_witness = greedy

    max_area = max(m.bit_count() for m in masks)
    lb = max(1, -(-len(entries) // max_area))

    nodes = 0

    def dfs(covered: int, depth: int, bound: int, chosen: list[int]) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(
                f"rank search exceeded {node_budget} nodes"
            )
        if covered == universe:
            return list(chosen)
        if depth == bound:
            return None
        rem = universe & ~covered
        best_res = 0
        for m in masks:
            r = (m & rem).bit_count()
            if r > best_res:
                best_res = r
        if best_res == 0 or depth + -(-rem.bit_count() // best_res) > bound:
            return None
        target = (rem & -rem).bit_length() - 1
        tried: list[int] = []
        for t in by_bit[target]:
            resid = masks[t] & rem
            if any(resid & ~prev == 0 for prev in tried):
                continue  # dominated by an already-explored branch
            tried.append(resid)
            chosen.append(t)
            found = dfs(covered | masks[t], depth + 1, bound, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    top = ub if limit is None else min(ub, limit)
    exact_sol: list[int] | None = None
    for bound in range(lb, top):
        sol = dfs(0, 0, bound, [])
        if sol is not None:
            exact_sol = sol
            break

    if exact_sol is not None:
        witness = exact_sol
        value = len(witness)
    elif limit is None or ub <= limit:
        witness = ub_witness
        value = ub
    else:
        # proved >= limit but the true value may be anywhere in [limit, ub]
        cov = Cover(a.rows, a.cols, tuple(rects[t] for t in ub_witness))
        return RankCertificate(None, cov, limit, "search", False)

    cov = Cover(a.rows, a.cols, tuple(rects[t] for t in witness))
    assert verify_cover(a, cov)
    return RankCertificate(value, cov, value, "search", True)


class _StopSearch(Exception):
    pass


@dataclass(frozen=True)
class IsolationResult:
    """Largest found set of pairwise-isolated 1-entries.

    Exact unless the search ran out of budget, in which case the value is
    still a valid lower bound with its witness.
    """

    value: int
    witness: tuple[tuple[int, int], ...]
    exact: bool


def isolation_number(
    a: BoolMatrix, node_budget: int = DEFAULT_NODE_BUDGET
) -> IsolationResult:
    """Maximum set of 1-entries, pairwise in distinct rows and columns, no
    two inside an all-ones 2x2 submatrix (maximum-clique search)."""
    dense = a.to_dense()
    verts = [(i, int(j)) for i in range(a.rows) for j in np.nonzero(dense[i])[0]]
    nv = len(verts)
    if nv == 0:
        return IsolationResult(0, (), True)
    adj = [0] * nv
    for u in range(nv):
        i, j = verts[u]
        for v in range(u + 1, nv):
            i2, j2 = verts[v]
            if i == i2 or j == j2:
                continue
            if dense[i, j2] and dense[i2, j]:
                continue  # the two would sit in an all-ones 2x2
            adj[u] |= 1 << v
            adj[v] |= 1 << u

    best: list[int] = []
    nodes = 0
    exact = True

    def expand(cur: list[int], cand: int) -> None:
        nonlocal best, nodes, exact
        nodes += 1
        if nodes > node_budget:
            exact = False
            raise _StopSearch
        if len(cur) + cand.bit_count() <= len(best):
            return
        if not cand:
            if len(cur) > len(best):
                best = list(cur)
            return
        while cand:
            if len(cur) + cand.bit_count() <= len(best):
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            cur.append(v)
            expand(cur, cand & adj[v])
            cur.pop()

    try:
        expand([], (1 << nv) - 1)
    except _StopSearch:
        pass
    return IsolationResult(len(best), tuple(verts[v] for v in best), exact)


@dataclass(frozen=True)
class MuResult:
    """ones(A) / max-rectangle-area as an exact fraction, with the witness."""

    value: Fraction
    ones: int
    max_rectangle_area: int
    witness: Rectangle
    via: str


def mu(a: BoolMatrix, rectangle_cap: int = DEFAULT_RECTANGLE_CAP) -> MuResult:
    """Number of ones divided by the largest all-ones rectangle area.

    Crown matrices take the closed form n(n-1) / (ceil(n/2) * floor(n/2));
    everything else maximizes over the enumerated maximal rectangles.
    """
    ones = a.count_ones()
    if ones == 0:
        raise ValueError("mu is undefined for the zero matrix")
    if is_crown(a):
        n = a.rows
        h = (n + 1) // 2
        witness = Rectangle(tuple(range(h)), tuple(range(h, n)))
        area = h * (n - h)
        return MuResult(Fraction(n * (n - 1), area), ones, area, witness, "crown-closed-form")
    rects = maximal_rectangles(a, rectangle_cap)
    witness = min(rects, key=lambda r: (-r.area, r.row_set, r.col_set))
    return MuResult(
        Fraction(ones, witness.area), ones, witness.area, witness, "enumeration"
    )


@dataclass(frozen=True)
class KronLowerBound:
    """Lower bounds for the Boolean rank of a Kronecker product.

    ``value`` is the density bound ceil(max(mu(A) R(B), mu(B) R(A)));
    ``isolation_bound`` the classical max(i(A) R(B), R(A) i(B)).
    """

    value: int
    isolation_bound: int
    mu_a: Fraction
    mu_b: Fraction
    rank_a: int
    rank_b: int
    isolation_a: int
    isolation_b: int

    @property
    def best(self) -> int:
        return max(self.value, self.isolation_bound)


def _rank_value(m: BoolMatrix) -> int:
    if is_crown(m):
        return sigma(m.rows)
    cert = exact_boolean_rank(m)
    if not cert.exact:
        raise BudgetExceededError("exact rank unavailable for lower-bound factor")
    return cert.value


def kron_lower_bound(a: BoolMatrix, b: BoolMatrix) -> KronLowerBound:
    """Certified lower bound on the rank of ``a (x) b`` (both orders tried)."""
    if a.is_zero() or b.is_zero():
        raise ValueError("lower bound requires nonzero factors")
    mu_a, mu_b = mu(a).value, mu(b).value
    rank_a, rank_b = _rank_value(a), _rank_value(b)
    iso_a = isolation_number(a)
    iso_b = isolation_number(b)
    if not (iso_a.exact and iso_b.exact):
        raise BudgetExceededError("isolation search exceeded its budget")
    value = math.ceil(max(mu_a * rank_b, mu_b * rank_a))
    iso_bound = max(iso_a.value * rank_b, rank_a * iso_b.value)
    return KronLowerBound(
        value, iso_bound, mu_a, mu_b, rank_a, rank_b, iso_a.value, iso_b.value
    )


def format_rank_certificate(cert: RankCertificate) -> str:
    from .cover import format_cover

    return format_cover(cert.upper) + f"LOWER kind={cert.lower_kind} value={cert.lower}\n"
