from fractions import Fraction as F

import pytest

from app.errors import AmbientError, NullSetError
from app.interval_sets import EMPTY, interval, measure
from app.measure_algebra import (
    ONE,
    ZERO,
    AlwaysLeft,
    AlwaysRight,
    BElement,
    SeededOracle,
    approach_element,
    approach_one,
    bisection_ladder,
    closure_witness,
    distance,
    membership_count,
    prime_bisection_step,
    ring_add,
    ring_mul,
    row_start,
    stretched_typewriter,
    typewriter,
    typewriter_modulus,
    typewriter_row,
)


def b(lo, hi):
    return BElement(interval(lo, hi))


class TestRing:
    def test_characteristic_two(self):
        assert ring_add(ONE, ONE) == ZERO

    def test_unit(self):
        a = b(F(1, 4), F(3, 4))
        assert ring_mul(ONE, a) == a

    def test_addition_is_symdiff(self):
        assert ring_add(b(0, F(1, 2)), b(F(1, 4), F(3, 4))).set == (
            interval(0, F(1, 4)) | interval(F(1, 2), F(3, 4))
        )

    def test_elements_live_in_unit_interval(self):
        with pytest.raises(AmbientError):
            BElement(interval(0, 2))


class TestTypewriter:
    @pytest.mark.parametrize(
        "k, lo, hi",
        [(1, 0, 1), (2, 0, F(1, 2)), (3, F(1, 2), 1), (5, F(1, 3), F(2, 3))],
    )
    def test_terms(self, k, lo, hi):
        assert typewriter(k) == b(lo, hi)

    def test_row_decoding(self):
        assert typewriter_row(1) == (1, 1)
        assert typewriter_row(6) == (3, 3)
        assert typewriter_row(7) == (4, 1)
        assert row_start(4) == 7

    def test_index_starts_at_one(self):
        with pytest.raises(ValueError):
            typewriter(0)

    def test_row_measures(self):
        for n in range(1, 51):
            for i in range(n):
                assert measure(typewriter(row_start(n) + i).set) == F(1, n)

    def test_distance_to_zero_is_row_measure(self):
        assert distance(typewriter(row_start(9)), ZERO) == F(1, 9)

    def test_every_point_is_covered_once_per_row(self):
        assert membership_count(F(1, 7), 50) == 50
        assert membership_count(0, 3) == 3

    @pytest.mark.parametrize("k, term", [(1, 1), (2, 1), (3, 2), (6, 2), (7, 3), (14, 3), (15, 4)])
    def test_stretched(self, k, term):
        assert stretched_typewriter(k) == typewriter(term)

    def test_modulus(self):
        n_index = typewriter_modulus(F(1, 4))
        # rows from 8 on are within 2/8 of each other
        assert n_index == row_start(8)
        for m in range(n_index, n_index + 20):
            assert distance(typewriter(m), typewriter(n_index)) <= F(1, 4)


class TestBisection:
    def test_single_steps(self):
        assert prime_bisection_step(interval(0, 1), AlwaysLeft()) == interval(0, F(1, 2))
        assert prime_bisection_step(interval(0, 1), AlwaysRight()) == interval(F(1, 2), 1)

    def test_three_left_steps(self):
        u = interval(0, 1)
        for _ in range(3):
            u = prime_bisection_step(u, AlwaysLeft())
        assert u == interval(0, F(1, 8))

    @pytest.mark.parametrize("seed", range(10))
    def test_ladder_halves_for_every_oracle(self, seed):
        for step, u, dist in bisection_ladder(interval(0, 1), SeededOracle(seed), 20):
            assert dist == F(1, 2**step) == measure(u)

    def test_approach_one(self):
        assert approach_one(interval(0, 1), SeededOracle(3), 10)[1] == F(1, 1024)
        assert approach_one(interval(0, F(1, 2)), AlwaysRight(), 1)[1] == F(1, 4)

    def test_zero_steps(self):
        u0 = interval(0, F(1, 3))
        assert approach_one(u0, AlwaysLeft(), 0) == (u0, F(1, 3))

    def test_null_set_refused(self):
        with pytest.raises(NullSetError):
            approach_one(EMPTY, AlwaysLeft(), 3)

    def test_seeded_oracle_is_reproducible(self):
        first = [u for _, u, _ in bisection_ladder(interval(0, 1), SeededOracle(42), 8)]
        second = [u for _, u, _ in bisection_ladder(interval(0, 1), SeededOracle(42), 8)]
        assert first == second

    @pytest.mark.parametrize(
        "v, u, expected",
        [
            (b(0, F(1, 2)), interval(0, F(1, 4)), F(1, 4)),
            (b(F(1, 2), 1), interval(0, F(1, 4)), 0),
        ],
    )
    def test_approach_element(self, v, u, expected):
        product, dist = approach_element(v, ring_add(ONE, BElement(u)))
        assert dist == expected

    def test_approach_element_with_unit(self):
        v = b(F(1, 5), F(3, 5))
        assert approach_element(v, ONE) == (v, 0)

    def test_closure_witness_bound(self):
        near, dist, bound = closure_witness(b(F(1, 8), F(7, 8)), interval(0, 1), SeededOracle(5), 6)
        assert bound == F(1, 64)
        assert dist <= bound
