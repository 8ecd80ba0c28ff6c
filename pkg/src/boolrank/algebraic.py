"""Finite-field function families and every-q-cover constructions.

Over a prime p, the p-1 functions g_i(x) = sum_t i^(t-1) * x_t (mod p) have
two properties: fixing all but the first coordinate leaves a bijection in
x_1, and no q distinct functions share a common collision (their coefficient
rows form an invertible Vandermonde system).  Feeding them through the
subset-family machinery yields, for block size 2d and arity q, a family of
p-1 crown covers of order p^q whose members have rank at most 2d and such
that *every q members* cover the crown.

Taking s of those members (s <= p-1, ceil(s/2) >= q) satisfies the
half-covering hypothesis of the cover composition, which certifies a
cover of crown (x) crown of size s * (2d)^2 -- the route to the
sub-multiplicativity gap at scales where the product cannot be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from math import comb
from typing import Iterator

import numpy as np

from .boolmat import BoolMatrix, max_entries_limit
from .cover import Cover, MatrixFamily, Rectangle, verify_kron_hypotheses
from .crown import colex_subsets, crown_matrix, restrict_family, sigma
from .errors import DimensionError, MaterializationLimitError, VerificationError


def largest_prime_leq(m: int) -> int:
    """Largest prime <= m, by trial division."""
    if m < 2:
        raise DimensionError(f"no prime <= {m}")
    for c in range(m, 1, -1):
        if _is_prime(c):
            return c
    raise AssertionError("unreachable")


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class ZpFunctionFamily:
    """The p-1 functions g_i(x) = sum_t i^(t-1) x_t mod p on Z_p^q.

    Tuples are encoded as flat indices with x_1 least significant:
    z = sum_t x_t * p^(t-1).
    """

    p: int
    q: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DimensionError(f"p={self.p} is not prime")
        if self.p <= self.q:
            raise DimensionError(f"need p > q, got p={self.p}, q={self.q}")

    @property
    def size(self) -> int:
        return self.p - 1

    def evaluate(self, i: int, x: tuple[int, ...]) -> int:
        if not 1 <= i <= self.p - 1:
            raise DimensionError(f"function index {i} outside [1..{self.p - 1}]")
        if len(x) != self.q or any(not 0 <= v < self.p for v in x):
            raise DimensionError(f"argument {x} is not a tuple over Z_{self.p}^{self.q}")
        return sum(pow(i, t, self.p) * x[t] for t in range(self.q)) % self.p

    def tuple_count(self) -> int:
        return self.p**self.q

    def digits(self) -> np.ndarray:
        """All p^q tuples as a (p^q, q) digit array, x_1 in column 0."""
        n = self.tuple_count()
        z = np.arange(n, dtype=np.int64)
        cols = [(z // self.p**t) % self.p for t in range(self.q)]
        return np.stack(cols, axis=1)

    def evaluate_all(self, i: int) -> np.ndarray:
        """g_i over all p^q tuples, indexed by the flat encoding."""
        coeffs = np.array([pow(i, t, self.p) for t in range(self.q)], dtype=np.int64)
        return (self.digits() @ coeffs) % self.p

    def check_bijection_property(self) -> bool:
        """Exhaustive: for each i and fixed tail, x_1 -> g_i(x) is a bijection."""
        expect = np.arange(self.p, dtype=np.int64)
        for i in range(1, self.p):
            table = self.evaluate_all(i).reshape(-1, self.p)
            if not np.array_equal(np.sort(table, axis=1), np.tile(expect, (table.shape[0], 1))):
                return False
        return True

    def check_no_common_collision(self) -> bool:
        """Exhaustive: no q distinct functions agree on two distinct tuples.

        Equivalent to the joint map x -> (g_i1(x), ..., g_iq(x)) being
        injective for every q-subset of indices, which is what is verified
        (a shared collision is exactly a violation of injectivity).
        """
        n = self.tuple_count()
        values = np.stack([self.evaluate_all(i) for i in range(1, self.p)], axis=0)
        powers = self.p ** np.arange(self.q, dtype=np.int64)
        from itertools import combinations

        for subset in combinations(range(self.p - 1), self.q):
            combined = values[list(subset)].T @ powers
            if np.bincount(combined, minlength=n).max() > 1:
                return False
        return True


def build_zp_family(p: int, q: int) -> ZpFunctionFamily:
    """Construct the family; primality and p > q are validated."""
    if q < 1:
        raise DimensionError("need q >= 1")
    return ZpFunctionFamily(p, q)


@dataclass(frozen=True)
class AlgebraicCoverParams:
    """Shape of one every-q-cover instance.

    ``blocks`` partitions [k] into q runs of 2d elements; ``block_subsets``
    holds the p chosen d-subsets per block (colex-smallest).
    """

    d: int
    q: int
    p: int
    n: int
    k: int
    blocks: tuple[tuple[int, ...], ...]
    block_subsets: tuple[tuple[tuple[int, ...], ...], ...]


def algebraic_family(
    d: int, q: int, max_entries: int | None = None
) -> tuple[AlgebraicCoverParams, MatrixFamily]:
    """Build the p-1 matrices of rank <= 2d, every q of which cover the crown.

    p is the largest prime <= C(2d, d) and the crown order is n = p^q.  Member
    i sums the element rectangles of block 1 after rewriting each family
    set's block-1 part through g_i; its decomposition lists those (at most
    2d) rectangles.
    """
    if d < 1:
        raise DimensionError("need d >= 1")
    if q < 2:
        raise DimensionError("need q >= 2")
    p = largest_prime_leq(comb(2 * d, d))
    if p <= q:
        raise DimensionError(f"largest prime {p} <= C({2*d},{d}) does not exceed q={q}")
    n = p**q
    limit = max_entries_limit(max_entries)
    if n * n > limit:
        raise MaterializationLimitError(
            f"family matrices have {n * n} entries each, limit is {limit}"
        )
    k = 2 * d * q
    blocks = tuple(
        tuple(range((j - 1) * 2 * d + 1, j * 2 * d + 1)) for j in range(1, q + 1)
    )
    block_subsets = tuple(
        tuple(islice(colex_subsets(block, d), p)) for block in blocks
    )
    params = AlgebraicCoverParams(d, q, p, n, k, blocks, block_subsets)

    fam = build_zp_family(p, q)
    digits = fam.digits()
    b1 = block_subsets[0]
    l1 = blocks[0]
    in_b1 = np.zeros((p, 2 * d), dtype=bool)
    for z, subset in enumerate(b1):
        for e in subset:
            in_b1[z, e - 1] = True  # block 1 is 1..2d, so e-1 indexes it

    nbytes = (n + 7) // 8
    members, decomps = [], []
    for i in range(1, p):
        coeffs = np.array([pow(i, t, p) for t in range(q)], dtype=np.int64)
        gvals = (digits @ coeffs) % p
        bits = np.zeros((n, nbytes), dtype=np.uint8)
        rects = []
        for t_idx, t in enumerate(l1):
            sel = in_b1[gvals, t_idx]
            rows = np.nonzero(sel)[0]
            cols = np.nonzero(~sel)[0]
            if rows.size and cols.size:
                col_mask = np.packbits((~sel).astype(np.uint8), bitorder="little")
                bits[rows] |= col_mask
                rects.append(
                    Rectangle(
                        tuple(int(x) for x in rows), tuple(int(x) for x in cols)
                    )
                )
        members.append(BoolMatrix.from_packed(n, n, bits))
        decomps.append(Cover(n, n, tuple(rects)))
    return params, MatrixFamily(tuple(members), tuple(decomps))


# -- asymptotic pipeline --------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticParams:
    """Derived parameters for covering crown(n) (x) crown(n).

    ``arithmetic_feasible`` requires p > q and p - 1 >= s (enough family
    members to select from); ``materializable`` additionally requires the
    n-cap-squared family matrices to fit the entry limit.  ``k`` is the
    crown rank padded to even.
    """

    n: int
    d: int
    q: int
    s: int
    p: int
    k: int
    bound: int
    arithmetic_feasible: bool
    materializable: bool

    @property
    def feasible(self) -> bool:
        return self.arithmetic_feasible and self.materializable


def _even_padded_rank(n: int) -> int:
    k = sigma(n)
    return k if k % 2 == 0 else k + 1


def asymptotic_params(n: int, max_entries: int | None = None) -> AsymptoticParams:
    """Parameters of the strict pipeline with arity q = 2^d.

    Picks the smallest d with n <= ((1/2) C(2d, d))^(2^d), reports the family
    size s = 2^(d+1) and the rectangle bound 2^(d+3) d^2, and flags whether
    the instance is actually buildable (prime large enough, matrices within
    the materialization limit).
    """
    if n < 2:
        raise DimensionError("need n >= 2")
    d = 1
    while (comb(2 * d, d) // 2) ** (2**d) < n:
        d += 1
    q = 2**d
    s = 2 ** (d + 1)
    bound = 2 ** (d + 3) * d * d
    p = largest_prime_leq(comb(2 * d, d))
    arithmetic = p > q and p - 1 >= s
    materializable = (p**q) ** 2 <= max_entries_limit(max_entries)
    return AsymptoticParams(
        n, d, q, s, p, _even_padded_rank(n), bound, arithmetic, materializable
    )


def generalized_params(
    n: int, q: int, s: int, max_entries: int | None = None
) -> AsymptoticParams:
    """Parameters for a caller-chosen arity q and selection size s.

    The smallest d is chosen from the *actual* prime: p = largest prime
    <= C(2d, d) with p > q, p - 1 >= s and p^q >= n.  The composition route
    needs every ceil(s/2)-subset to inherit the every-q property, so
    s >= 2q - 1.
    """
    if q < 2:
        raise DimensionError("need q >= 2")
    if s < 2 * q - 1:
        raise DimensionError(f"need s >= 2q-1 = {2 * q - 1} so half-subsets cover")
    d = 1
    while True:
        c = comb(2 * d, d)
        if c >= 2:
            p = largest_prime_leq(c)
            if p > q and p - 1 >= s and p**q >= n:
                break
        d += 1
    bound = s * (2 * d) ** 2
    materializable = (p**q) ** 2 <= max_entries_limit(max_entries)
    return AsymptoticParams(
        n, d, q, s, p, _even_padded_rank(n), bound, True, materializable
    )


def format_params_line(params: AsymptoticParams) -> str:
    feasible = "yes" if params.feasible else "no"
    return (
        f"PARAMS d={params.d} q={params.q} p={params.p} n={params.n} "
        f"k={params.k} s={params.s} bound={params.bound} feasible={feasible}"
    )


@dataclass(frozen=True)
class KronCoverDescription:
    """A composed cover of a Kronecker product, held in factored form.

    The certificate is the pair of families plus the verified composition
    hypotheses; the product rectangles (size = sum over t of the product of
    decomposition sizes) are generated on demand rather than materialized,
    since at gap-witness scale a single rectangle can have ~10^7 rows.
    """

    rows_a: int
    cols_a: int
    rows_b: int
    cols_b: int
    m_family: MatrixFamily
    n_family: MatrixFamily
    size: int
    verified: bool

    @property
    def target_dims(self) -> tuple[int, int]:
        return self.rows_a * self.rows_b, self.cols_a * self.cols_b

    def iter_rectangles(self) -> Iterator[Rectangle]:
        for dm, dn in zip(self.m_family.decompositions, self.n_family.decompositions):
            for rm in dm.rects:
                row_a = np.array(rm.row_set) * self.rows_b
                col_a = np.array(rm.col_set) * self.cols_b
                for rn in dn.rects:
                    rows = (row_a[:, None] + np.array(rn.row_set)).ravel()
                    cols = (col_a[:, None] + np.array(rn.col_set)).ravel()
                    yield Rectangle(
                        tuple(int(x) for x in rows), tuple(int(x) for x in cols)
                    )

    def to_cover(self) -> Cover:
        rows, cols = self.target_dims
        return Cover(rows, cols, tuple(self.iter_rectangles()))


@dataclass(frozen=True)
class AsymptoticCoverResult:
    """Outcome of the asymptotic pipeline: parameters plus, when feasible,
    the lazily-verified cover description of crown(n) (x) crown(n)."""

    params: AsymptoticParams
    description: KronCoverDescription | None
    message: str

    @property
    def feasible(self) -> bool:
        return self.description is not None


def asymptotic_cover(
    n: int,
    q: int | None = None,
    s: int | None = None,
    max_entries: int | None = None,
) -> AsymptoticCoverResult:
    """Cover crown(n) (x) crown(n) through the every-q family.

    Without ``q``/``s`` the strict parameters (q = 2^d, s = 2^(d+1)) are
    used; these are infeasible at desk scale, and the result then carries
    the parameter report only.  With explicit ``q`` and ``s`` the smallest
    workable d is chosen, s members are selected, and the composition
    hypotheses are verified symmetrically without materializing the product.
    """
    if q is None and s is None:
        params = asymptotic_params(n, max_entries)
        if not params.arithmetic_feasible:
            return AsymptoticCoverResult(
                params,
                None,
                f"infeasible: p-1 = {params.p - 1} members available, "
                f"need s = {params.s} (or prime {params.p} <= q = {params.q})",
            )
        if not params.materializable:
            return AsymptoticCoverResult(
                params,
                None,
                f"parameters feasible but family matrices of order {params.p}^"
                f"{params.q} exceed the materialization limit; report only",
            )
    elif q is None or s is None:
        raise DimensionError("supply both q and s, or neither")
    else:
        params = generalized_params(n, q, s, max_entries)
        if not params.materializable:
            return AsymptoticCoverResult(
                params,
                None,
                f"family matrices of order {params.p}^{params.q} exceed the "
                f"materialization limit; report only",
            )

    _, fam = algebraic_family(params.d, params.q, max_entries)
    selected = MatrixFamily(
        fam.members[: params.s], fam.decompositions[: params.s]
    )
    cap = params.p**params.q
    if n < cap:
        selected = restrict_family(selected, n)
    elif n > cap:
        raise AssertionError("parameter scan produced too small a cap")
    target = crown_matrix(n)
    res = verify_kron_hypotheses(target, selected, target, selected)
    if not res:
        raise VerificationError(
            f"composition hypotheses fail at {res.witness}: {res.reason}",
            witness=res.witness,
        )
    size = sum(d.size * d.size for d in selected.decompositions)
    description = KronCoverDescription(
        n, n, n, n, selected, selected, size, True
    )
    return AsymptoticCoverResult(
        params, description, f"verified composed cover of size {size}"
    )
