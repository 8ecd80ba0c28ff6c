"""Crown matrices and their subset-family covers.

The n x n crown matrix (zero diagonal, ones elsewhere) has Boolean rank
sigma(n), the least k with n <= C(k, ceil(k/2)).  Assigning ceil(k/2)-subsets
of [k] to rows and their complements to columns realizes the crown as an
intersection matrix; the k "element" rectangles then cover it.

Permuting the subset labelling with a carefully chosen bijection yields a
second cover sharing its first rectangles with the original, which is how
the coverable triples behind the sub-multiplicativity gaps are built: an
[r]-preserving, [r]-intersection-shifting bijection gives three matrices of
ranks (r, k-r, k-r) of which every two cover the crown.

Subset families are enumerated in colexicographic order throughout, so
partial families are prefixes and all constructions are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .boolmat import BoolMatrix
from .cover import (
    Cover,
    MatrixFamily,
    Rectangle,
    best_triple_pairing,
    compose_kron_cover,
    cover_matrix,
)
from .errors import DimensionError, FormatError, VerificationError


def crown_matrix(n: int) -> BoolMatrix:
    """The n x n matrix with zero diagonal and ones everywhere else."""
    if n < 1:
        raise DimensionError("crown matrix needs n >= 1")
    nbytes = (n + 7) // 8
    row = np.packbits(np.ones(n, dtype=np.uint8), bitorder="little")
    bits = np.tile(row, (n, 1))
    idx = np.arange(n)
    bits[idx, idx >> 3] &= ~(np.uint8(1) << (idx & 7).astype(np.uint8))
    return BoolMatrix.from_packed(n, n, bits)


def sigma(n: int) -> int:
    """Smallest k with n <= C(k, ceil(k/2)); the Boolean rank of the crown."""
    if n < 1:
        raise DimensionError("sigma needs n >= 1")
    k = 0
    while comb(k, (k + 1) // 2) < n:
        k += 1
    return k


def colex_subsets(elements: Sequence[int], size: int) -> Iterator[tuple[int, ...]]:
    """All size-subsets of a sorted sequence in colexicographic order."""
    elements = tuple(elements)
    if size == 0:
        yield ()
        return
    for m in range(size - 1, len(elements)):
        for prefix in colex_subsets(elements[:m], size - 1):
            yield prefix + (elements[m],)


@dataclass(frozen=True)
class SubsetFamily:
    """An ordered collection of distinct ell-subsets of [k], 1-based."""

    k: int
    ell: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for s in self.sets:
            if len(s) != self.ell:
                raise ValueError(f"set {s} does not have size {self.ell}")
            if any(b <= a for a, b in zip(s, s[1:])):
                raise ValueError(f"set {s} must be sorted strictly increasing")
            if s and (s[0] < 1 or s[-1] > self.k):
                raise ValueError(f"set {s} has elements outside [1..{self.k}]")
            if s in seen:
                raise ValueError(f"duplicate set {s}")
            seen.add(s)

    def __len__(self) -> int:
        return len(self.sets)

    def masks(self) -> np.ndarray:
        """Bitmask array of the sets (element e -> bit e-1)."""
        out = np.zeros(len(self.sets), dtype=np.int64)
        for i, s in enumerate(self.sets):
            m = 0
            for e in s:
                m |= 1 << (e - 1)
            out[i] = m
        return out


def canonical_family(k: int, n: int) -> SubsetFamily:
    """The first n ceil(k/2)-subsets of [k] in colex order."""
    ell = (k + 1) // 2
    if n > comb(k, ell):
        raise DimensionError(f"n={n} exceeds C({k},{ell})={comb(k, ell)}")
    sets = tuple(islice(colex_subsets(range(1, k + 1), ell), n))
    return SubsetFamily(k, ell, sets)


def family_matrix(f: SubsetFamily) -> BoolMatrix:
    """The intersection matrix B_F: entry (i, j) = 1 iff F_i meets [k] \\ F_j.

    For distinct subsets of size ceil(k/2) this equals the crown matrix.
    """
    n = len(f)
    masks = f.masks()
    full = (1 << f.k) - 1
    comp = full & ~masks
    nbytes = (n + 7) // 8
    bits = np.zeros((n, nbytes), dtype=np.uint8)
    block = max(1, (1 << 22) // max(1, n))
    for r0 in range(0, n, block):
        r1 = min(n, r0 + block)
        inter = (masks[r0:r1, None] & comp[None, :]) != 0
        bits[r0:r1] = np.packbits(inter.astype(np.uint8), axis=1, bitorder="little")
    return BoolMatrix.from_packed(n, n, bits)


def intersection_rectangle(f: SubsetFamily, t: int) -> Rectangle:
    """The rank-1 matrix P_F(t): rows whose set holds t, columns whose set lacks t."""
    if not 1 <= t <= f.k:
        raise DimensionError(f"element {t} outside [1..{f.k}]")
    rows = tuple(i for i, s in enumerate(f.sets) if t in s)
    cols = tuple(j for j, s in enumerate(f.sets) if t not in s)
    if not rows or not cols:
        raise ValueError(f"element {t} yields an empty rectangle in this family")
    return Rectangle(rows, cols)


def family_cover(f: SubsetFamily) -> Cover:
    """Cover of B_F by the element rectangles P_F(1..k), skipping empty ones."""
    n = len(f)
    rects = []
    for t in range(1, f.k + 1):
        rows = tuple(i for i, s in enumerate(f.sets) if t in s)
        cols = tuple(j for j, s in enumerate(f.sets) if t not in s)
        if rows and cols:
            rects.append(Rectangle(rows, cols))
    return Cover(n, n, tuple(rects))


# -- bijections ---------------------------------------------------------------

@dataclass(frozen=True)
class FamilyBijection:
    """A bijection of a subset family onto itself, stored positionally."""

    domain: SubsetFamily
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.images) != len(self.domain.sets):
            raise ValueError("images must pair with domain sets")
        if set(self.images) != set(self.domain.sets):
            raise ValueError("images are not a permutation of the domain")

    def apply(self, s: tuple[int, ...]) -> tuple[int, ...]:
        try:
            return self.images[self.domain.sets.index(s)]
        except ValueError:
            raise KeyError(f"{s} not in bijection domain") from None

    def mapping(self) -> dict[tuple[int, ...], tuple[int, ...]]:
        return dict(zip(self.domain.sets, self.images))


def _perfect_matching(adj: list[list[int]], n_right: int) -> list[int]:
    """Augmenting-path perfect matching; left vertices processed in order."""
    match_right = [-1] * n_right
    match_left = [-1] * len(adj)

    def augment(u: int, visited: list[bool]) -> bool:
        for v in adj[u]:
            if not visited[v]:
                visited[v] = True
                if match_right[v] == -1 or augment(match_right[v], visited):
                    match_right[v] = u
                    match_left[u] = v
                    return True
        return False

    for u in range(len(adj)):
        if not augment(u, [False] * n_right):
            raise AssertionError("perfect matching must exist in a regular graph")
    return match_left


def build_g(k: int) -> FamilyBijection:
    """A bijection g on the (ell-1)-subsets of [k-1] with F and g(F) disjoint.

    Odd k: plain complement within [k-1].  Even k: match each (ell-1)-subset
    to a distinct ell-superset in the (regular, hence perfectly matchable)
    containment graph and complement the superset.  Any perfect matching is
    acceptable; vertices are scanned in colex order for determinism.
    """
    if k < 2:
        raise DimensionError("build_g needs k >= 2")
    ell = (k + 1) // 2
    ground = tuple(range(1, k))
    domain_sets = tuple(colex_subsets(ground, ell - 1))
    domain = SubsetFamily(k - 1, ell - 1, domain_sets)
    full = set(ground)

    if k % 2 == 1:
        images = tuple(tuple(sorted(full - set(s))) for s in domain_sets)
        return FamilyBijection(domain, images)

    right_sets = tuple(colex_subsets(ground, ell))
    right_index = {s: i for i, s in enumerate(right_sets)}
    adj = []
    for s in domain_sets:
        sset = set(s)
        supersets = [tuple(sorted(sset | {x})) for x in ground if x not in sset]
        adj.append(sorted(right_index[sup] for sup in supersets))
    match_left = _perfect_matching(adj, len(right_sets))
    images = tuple(
        tuple(sorted(full - set(right_sets[match_left[i]])))
        for i in range(len(domain_sets))
    )
    return FamilyBijection(domain, images)


def build_h(k: int, i: int) -> FamilyBijection:
    """An {i}-preserving, {i}-intersection-shifting bijection of all
    ceil(k/2)-subsets of [k].

    Sets containing i map to g(F - {i}) + {i} with g from :func:`build_g`
    relabelled onto [k] - {i}; other sets are fixed.  The counting argument
    behind the shifting property needs k >= 5.
    """
    if k < 5:
        raise DimensionError("build_h needs k >= 5")
    if not 1 <= i <= k:
        raise DimensionError(f"element {i} outside [1..{k}]")
    ell = (k + 1) // 2
    domain = canonical_family(k, comb(k, ell))
    g = build_g(k)
    g_map = g.mapping()
    others = tuple(e for e in range(1, k + 1) if e != i)
    to_g = {e: idx + 1 for idx, e in enumerate(others)}
    from_g = {idx + 1: e for idx, e in enumerate(others)}

    images = []
    for s in domain.sets:
        if i in s:
            relabelled = tuple(sorted(to_g[e] for e in s if e != i))
            image = g_map[relabelled]
            images.append(tuple(sorted([from_g[e] for e in image] + [i])))
        else:
            images.append(s)
    return FamilyBijection(domain, tuple(images))


def is_L_preserving(h: FamilyBijection, L: Sequence[int]) -> bool:
    """Exhaustive check: every set meets L exactly as its image does."""
    l_set = set(L)
    return all(
        set(s) & l_set == set(img) & l_set for s, img in zip(h.domain.sets, h.images)
    )


def is_L_intersection_shifting(h: FamilyBijection, L: Sequence[int]) -> bool:
    """Exhaustive check over all pairs (D, E) of the shifting property.

    Whenever D meets the complement of E only inside L (and does meet it),
    the image pair must intersect outside L.
    """
    k = h.domain.k
    full = (1 << k) - 1
    l_mask = 0
    for e in L:
        l_mask |= 1 << (e - 1)
    d_masks = h.domain.masks()
    h_masks = np.zeros(len(h.images), dtype=np.int64)
    for idx, s in enumerate(h.images):
        m = 0
        for e in s:
            m |= 1 << (e - 1)
        h_masks[idx] = m
    comp = full & ~d_masks
    comp_h = full & ~h_masks
    n = len(d_masks)
    block = max(1, (1 << 22) // max(1, n))
    for r0 in range(0, n, block):
        r1 = min(n, r0 + block)
        inter = d_masks[r0:r1, None] & comp[None, :]
        need = (inter != 0) & ((inter & ~l_mask) == 0)
        if not need.any():
            continue
        shifted = (h_masks[r0:r1, None] & comp_h[None, :]) & ~l_mask
        if np.any(need & (shifted == 0)):
            return False
    return True


# -- coverable triples ---------------------------------------------------------

def triple_cover(
    k: int, r: int = 1, h: FamilyBijection | None = None
) -> MatrixFamily:
    """Three matrices of ranks (r, k-r, k-r), every two covering the crown.

    Uses the full colex family of ceil(k/2)-subsets of [k], so the target is
    the crown of order C(k, ceil(k/2)).  For r = 1 the bijection is built
    internally; for larger r the caller must supply an [r]-preserving and
    [r]-intersection-shifting bijection of the full family.
    """
    if not 1 <= r <= k:
        raise DimensionError(f"r={r} outside [1..{k}]")
    ell = (k + 1) // 2
    n = comb(k, ell)
    fam = canonical_family(k, n)
    if h is None:
        if r != 1:
            raise ValueError("a bijection must be supplied for r > 1")
        h = build_h(k, 1)
    if h.domain.sets != fam.sets:
        raise ValueError("bijection domain must be the full colex family")
    L = tuple(range(1, r + 1))
    if not is_L_preserving(h, L) or not is_L_intersection_shifting(h, L):
        raise VerificationError(
            f"bijection is not [{r}]-preserving and [{r}]-intersection shifting"
        )
    f_prime = SubsetFamily(k, ell, tuple(h.apply(s) for s in fam.sets))

    def summed(source: SubsetFamily, ts: range) -> tuple[BoolMatrix, Cover]:
        rects = tuple(intersection_rectangle(source, t) for t in ts)
        cov = Cover(n, n, rects)
        return cover_matrix(cov), cov

    a1, d1 = summed(fam, range(1, r + 1))
    a2, d2 = summed(fam, range(r + 1, k + 1))
    a3, d3 = summed(f_prime, range(r + 1, k + 1))
    return MatrixFamily((a1, a2, a3), (d1, d2, d3))


def restrict_family(fam: MatrixFamily, n: int) -> MatrixFamily:
    """Restrict a family over a crown to its leading n x n corner.

    Rectangles are intersected with the index prefix and dropped when they
    vanish; pairwise-covering properties survive restriction.
    """
    rows, cols = fam.dims
    if n > rows or n > cols:
        raise DimensionError(f"cannot restrict {rows}x{cols} family to {n}")
    members = tuple(m.submatrix(n, n) for m in fam.members)
    decomps = None
    if fam.decompositions is not None:
        new_covers = []
        for d in fam.decompositions:
            rects = []
            for rect in d.rects:
                rs = tuple(x for x in rect.row_set if x < n)
                cs = tuple(x for x in rect.col_set if x < n)
                if rs and cs:
                    rects.append(Rectangle(rs, cs))
            new_covers.append(Cover(n, n, tuple(rects)))
        decomps = tuple(new_covers)
    return MatrixFamily(members, decomps)


def c5_triple() -> MatrixFamily:
    """The explicit (2, 2, 3) triple for the order-5 crown.

    Rows carry the 4-subsets {1,4,5,7}, {1,3,6,7}, {2,4,6,7}, {2,3,5,7},
    {3,4,5,6} of [7]; the members group the element rectangles at {1,2},
    {3,4} and {5,6,7}.  Every two members cover the crown.
    """
    fam = SubsetFamily(
        7,
        4,
        (
            (1, 4, 5, 7),
            (1, 3, 6, 7),
            (2, 4, 6, 7),
            (2, 3, 5, 7),
            (3, 4, 5, 6),
        ),
    )
    groups = ((1, 2), (3, 4), (5, 6, 7))
    members, decomps = [], []
    for ts in groups:
        rects = tuple(intersection_rectangle(fam, t) for t in ts)
        cov = Cover(5, 5, rects)
        members.append(cover_matrix(cov))
        decomps.append(cov)
    return MatrixFamily(tuple(members), tuple(decomps))


def c4_triple() -> MatrixFamily:
    """A (2, 2, 2) triple for the order-4 crown, every two covering it.

    The three members pair up the four indices in the three possible ways
    ({0,1}|{2,3}, {0,3}|{1,2}, {0,2}|{1,3}); found once by exhaustive search
    over rank-<=2 matrices below the crown and frozen here.
    """
    splits = (
        ((0, 1), (2, 3)),
        ((0, 3), (1, 2)),
        ((0, 2), (1, 3)),
    )
    members, decomps = [], []
    for x, y in splits:
        rects = (Rectangle(x, y), Rectangle(y, x))
        cov = Cover(4, 4, rects)
        members.append(cover_matrix(cov))
        decomps.append(cov)
    return MatrixFamily(tuple(members), tuple(decomps))


def coverable_triple(n: int) -> MatrixFamily:
    """A triple for the order-n crown with every two members covering it.

    n >= 7 uses the (1, k-1, k-1) construction restricted to the colex
    prefix; n in {4, 5} uses the explicit small triples.  No triple is
    available for n = 6 (or for pairing two order-5 crowns).
    """
    if n >= 7:
        k = sigma(n)
        full = comb(k, (k + 1) // 2)
        fam = triple_cover(k, 1)
        return restrict_family(fam, n) if n < full else fam
    if n == 5:
        return c5_triple()
    if n == 4:
        return c4_triple()
    raise DimensionError(f"no coverable triple available for n={n}")


def gap_families(n: int, m: int) -> tuple[MatrixFamily, MatrixFamily]:
    """The pair of triples whose composition covers crown(n) (x) crown(m).

    The second triple is reordered to minimize the composed size; for
    n, m >= 7 the minimum is sigma(n) * sigma(m) - 1.
    """
    if n == 5 and m == 5:
        raise DimensionError("no gap construction is known for two order-5 crowns")
    m_fam = coverable_triple(n)
    n_fam = coverable_triple(m)
    n_fam, _ = best_triple_pairing(m_fam, n_fam)
    return m_fam, n_fam


def gap_cover(n: int, m: int) -> Cover:
    """An explicit cover of crown(n) (x) crown(m) beating the rank product."""
    m_fam, n_fam = gap_families(n, m)
    return compose_kron_cover(m_fam, n_fam)


# -- text format ----------------------------------------------------------------

def format_subset_family(f: SubsetFamily) -> str:
    lines = [f"FAMILY-SETS {f.k} {f.ell} {len(f)}"]
    for s in f.sets:
        lines.append(",".join(str(e) for e in s))
    return "\n".join(lines) + "\n"


def parse_subset_family(text: str) -> SubsetFamily:
    lines = text.split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty subset-family file", line=1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "FAMILY-SETS":
        raise FormatError("expected 'FAMILY-SETS k ell n'", line=1)
    try:
        k, ell, n = int(head[1]), int(head[2]), int(head[3])
    except ValueError:
        raise FormatError("header fields must be integers", line=1) from None
    if len(lines) != n + 1:
        raise FormatError(f"expected {n} set lines", line=len(lines))
    sets = []
    for idx in range(n):
        token = lines[1 + idx]
        try:
            s = tuple(int(x) for x in token.split(","))
        except ValueError:
            raise FormatError(f"bad set {token!r}", line=2 + idx) from None
        sets.append(s)
    try:
        return SubsetFamily(k, ell, tuple(sets))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_subset_family(path: str, f: SubsetFamily) -> None:
    with open(path, "w") as fh:
        fh.write(format_subset_family(f))


def read_subset_family(path: str) -> SubsetFamily:
    with open(path) as fh:
        return parse_subset_family(fh.read())
