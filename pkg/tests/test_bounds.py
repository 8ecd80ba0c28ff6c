import random
from fractions import Fraction

import pytest

from boolrank.boolmat import BoolMatrix, kronecker
from boolrank.bounds import (
    exact_boolean_rank,
    format_rank_certificate,
    is_crown,
    isolation_number,
    kron_lower_bound,
    maximal_rectangles,
    mu,
)
from boolrank.cover import verify_cover
from boolrank.crown import crown_matrix, gap_cover, sigma
from boolrank.errors import BudgetExceededError


def rand_matrix(rng, rows, cols, density=0.5):
    dense = [[1 if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]
    return BoolMatrix.from_dense(dense)


class TestMaximalRectangles:
    def test_crown3(self):
        rects = maximal_rectangles(crown_matrix(3))
        # row/column index sets of a crown rectangle are disjoint; maximal
        # ones have complementary column sets
        assert len(rects) == 6
        for r in rects:
            assert not set(r.row_set) & set(r.col_set)
            assert set(r.row_set) | set(r.col_set) == {0, 1, 2}

    def test_rectangles_are_all_ones_and_maximal(self):
        rng = random.Random(20)
        for _ in range(25):
            m = rand_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
            if m.is_zero():
                continue
            dense = m.to_dense()
            rects = maximal_rectangles(m)
            seen = set()
            for r in rects:
                assert all(dense[i, j] for i in r.row_set for j in r.col_set)
                assert r.col_set not in seen
                seen.add(r.col_set)
                # maximality: no row or column extends it
                for i in range(m.rows):
                    if i not in r.row_set:
                        assert not all(dense[i, j] for j in r.col_set)
                for j in range(m.cols):
                    if j not in r.col_set:
                        assert not all(dense[i, j] for i in r.row_set)

    def test_every_one_entry_in_some_rectangle(self):
        rng = random.Random(21)
        for _ in range(25):
            m = rand_matrix(rng, 5, 5)
            if m.is_zero():
                continue
            union = None
            for r in maximal_rectangles(m):
                rm = r.to_matrix(5, 5)
                union = rm if union is None else BoolMatrix.from_dense(
                    union.to_dense() | rm.to_dense()
                )
            assert union == m


class TestExactRank:
    def test_trivial_cases(self):
        assert exact_boolean_rank(BoolMatrix.ones(4, 4)).value == 1
        cert = exact_boolean_rank(BoolMatrix.zeros(3, 3))
        assert cert.value == 0 and cert.upper.size == 0 and cert.exact

    def test_c4_is_4(self):
        cert = exact_boolean_rank(crown_matrix(4))
        assert cert.value == 4 and cert.exact
        assert verify_cover(crown_matrix(4), cert.upper)
        assert cert.lower == 4 and cert.lower_kind == "search"

    @pytest.mark.parametrize("n", range(1, 8))
    def test_crown_matches_sigma(self, n):
        cert = exact_boolean_rank(crown_matrix(n))
        assert cert.value == sigma(n)
        assert verify_cover(crown_matrix(n), cert.upper)

    def test_identity_rank(self):
        assert exact_boolean_rank(BoolMatrix.identity(5)).value == 5

    def test_upper_bound_respected_on_random(self):
        rng = random.Random(22)
        for _ in range(20):
            m = rand_matrix(rng, 5, 5)
            cert = exact_boolean_rank(m)
            assert cert.exact
            assert verify_cover(m, cert.upper)
            assert cert.value == cert.upper.size == cert.lower

    def test_limit_proof_token(self):
        cert = exact_boolean_rank(crown_matrix(6), limit=3)
        assert not cert.exact
        assert cert.value is None
        assert cert.lower == 3 and cert.lower_kind == "search"
        assert verify_cover(crown_matrix(6), cert.upper)

    def test_limit_above_value_still_exact(self):
        cert = exact_boolean_rank(crown_matrix(5), limit=10)
        assert cert.exact and cert.value == 4

    def test_budget_exceeded_raises(self):
        with pytest.raises(BudgetExceededError):
            exact_boolean_rank(crown_matrix(8), node_budget=10)

    def test_certificate_dump(self):
        cert = exact_boolean_rank(crown_matrix(2))
        text = format_rank_certificate(cert)
        assert text.startswith("COVER 2 2 2\n")
        assert text.endswith("LOWER kind=search value=2\n")


class TestIsolation:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_identity(self, n):
        res = isolation_number(BoolMatrix.identity(n))
        assert res.value == n and res.exact
        assert len(res.witness) == n

    @pytest.mark.parametrize("n", range(3, 9))
    def test_crown_is_3(self, n):
        res = isolation_number(crown_matrix(n))
        assert res.value == 3 and res.exact

    def test_all_ones_2x2(self):
        assert isolation_number(BoolMatrix.ones(2, 2)).value == 1

    def test_witness_is_valid(self):
        rng = random.Random(23)
        for _ in range(20):
            m = rand_matrix(rng, 5, 5)
            res = isolation_number(m)
            dense = m.to_dense()
            w = res.witness
            for a in range(len(w)):
                i, j = w[a]
                assert dense[i, j]
                for b in range(a + 1, len(w)):
                    i2, j2 = w[b]
                    assert i != i2 and j != j2
                    assert not (dense[i, j2] and dense[i2, j])

    def test_at_most_rank(self):
        rng = random.Random(24)
        for _ in range(15):
            m = rand_matrix(rng, 4, 4)
            if m.is_zero():
                continue
            assert isolation_number(m).value <= exact_boolean_rank(m).value


class TestMu:
    def test_crown_closed_form(self):
        assert mu(crown_matrix(4)).value == Fraction(3)
        assert mu(crown_matrix(5)).value == Fraction(10, 3)
        res = mu(crown_matrix(5))
        assert res.via == "crown-closed-form"
        assert res.max_rectangle_area == 6

    def test_all_ones(self):
        res = mu(BoolMatrix.ones(3, 4))
        assert res.value == 1

    def test_closed_form_matches_enumeration(self):
        for n in range(2, 9):
            c = crown_matrix(n)
            closed = mu(c)
            best = max(r.area for r in maximal_rectangles(c))
            assert closed.max_rectangle_area == best
            assert closed.value == Fraction(c.count_ones(), best)
            dense = c.to_dense()
            assert all(
                dense[i, j] for i in closed.witness.row_set for j in closed.witness.col_set
            )

    def test_mu_at_most_rank(self):
        rng = random.Random(25)
        for _ in range(15):
            m = rand_matrix(rng, 4, 5)
            if m.is_zero():
                continue
            assert mu(m).value <= exact_boolean_rank(m).value

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            mu(BoolMatrix.zeros(2, 2))


class TestKronLowerBound:
    def test_order4_square_is_12(self):
        res = kron_lower_bound(crown_matrix(4), crown_matrix(4))
        assert res.value == 12
        assert res.isolation_bound == 12
        assert res.best == 12

    def test_c4_c5_is_14(self):
        res = kron_lower_bound(crown_matrix(4), crown_matrix(5))
        assert res.value == 14
        assert res.mu_b == Fraction(10, 3) and res.rank_a == 4

    def test_c10_is_18(self):
        res = kron_lower_bound(crown_matrix(10), crown_matrix(10))
        assert res.value == 18

    def test_sandwich_against_gap_covers(self):
        for n in [7, 8, 9, 10]:
            lower = kron_lower_bound(crown_matrix(n), crown_matrix(n)).value
            assert lower <= gap_cover(n, n).size

    def test_lower_bound_at_most_exact_small(self):
        c2 = crown_matrix(2)
        res = kron_lower_bound(c2, c2)
        assert res.value <= exact_boolean_rank(kronecker(c2, c2)).value

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            kron_lower_bound(BoolMatrix.zeros(2, 2), crown_matrix(2))


class TestIsCrown:
    def test_detection(self):
        assert is_crown(crown_matrix(5))
        assert not is_crown(BoolMatrix.ones(3, 3))
        assert not is_crown(BoolMatrix.ones(2, 3))
