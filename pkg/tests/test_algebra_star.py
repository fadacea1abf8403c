from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from app.algebra_star import (
    UNIT_SET,
    FiniteAlgebra,
    StepFunction,
    assemble_limit,
    astar_bisection_step,
    astar_distance_to_one,
    characteristic_step,
    common_refinement,
    cyclic_ring,
    d_prime,
    d_prime_half_sum,
    d_prime_refinement,
    lift_op,
    nilpotent_labels,
    normalize_partition,
    step_dumps,
    step_from_json_value,
    step_to_json_value,
)
from app.errors import AlgebraError, ArityMismatchError, PartitionError, StepFunctionError
from app.interval_sets import EMPTY, from_pairs, interval, measure, metric_d
from app.measure_algebra import AlwaysLeft, SeededOracle
from tests.strategies import step_functions

Z6 = ("0", "1", "2", "3", "4", "5")


@pytest.fixture(scope="module")
def z2():
    return cyclic_ring(2)


@pytest.fixture(scope="module")
def z6():
    return cyclic_ring(6)


class TestFiniteAlgebra:
    def test_cyclic_tables(self, z6):
        assert z6.apply("add", "4", "5") == "3"
        assert z6.apply("mul", "2", "3") == "0"
        assert z6.apply("neg", "1") == "5"
        assert (z6.zero, z6.one) == ("0", "1")

    def test_arity_checked(self, z6):
        with pytest.raises(ArityMismatchError) as info:
            z6.apply("add", "1")
        assert (info.value.expected, info.value.got) == (2, 1)

    def test_partial_table_rejected(self):
        with pytest.raises(AlgebraError):
            FiniteAlgebra.from_description({"carrier": ["a", "b"], "ops": {"f": {"arity": 1, "table": ["a"]}}})

    def test_table_leaving_carrier_rejected(self):
        with pytest.raises(AlgebraError):
            FiniteAlgebra.from_description({"carrier": ["a"], "ops": {"f": {"arity": 1, "table": ["z"]}}})

    def test_from_json(self):
        alg = FiniteAlgebra.from_json('{"carrier": ["x", "y"], "ops": {"swap": {"arity": 1, "table": ["y", "x"]}}}')
        assert alg.apply("swap", "x") == "y"
        assert not alg.is_ring

    def test_nilpotents(self):
        assert nilpotent_labels(cyclic_ring(6)) == []
        assert nilpotent_labels(cyclic_ring(4)) == ["2"]


class TestStepFunction:
    def test_parts_must_cover(self):
        with pytest.raises(StepFunctionError):
            StepFunction(((interval(0, F(1, 2)), "a"),))

    def test_parts_must_be_disjoint(self):
        with pytest.raises(StepFunctionError):
            StepFunction(((interval(0, F(3, 4)), "a"), (interval(F(1, 2), 1), "b")))

    def test_labels_distinct(self):
        with pytest.raises(StepFunctionError):
            StepFunction(((interval(0, F(1, 2)), "a"), (interval(F(1, 2), 1), "a")))

    def test_value_at(self):
        f = StepFunction.from_mapping({"a": interval(0, F(1, 3)), "b": interval(F(1, 3), 1)})
        assert f.value_at(F(1, 3)) == "b"
        assert f.part("c") == EMPTY

    def test_json(self):
        f = characteristic_step(interval(0, F(1, 2)))
        assert step_to_json_value(f) == [{"part": [["0", "1/2"]], "label": "1"}, {"part": [["1/2", "1"]], "label": "0"}]
        assert step_from_json_value(step_to_json_value(f)) == f
        assert step_dumps(f) == '[{"part":[["0","1/2"]],"label":"1"},{"part":[["1/2","1"]],"label":"0"}]'


class TestDPrime:
    def test_self_distance(self):
        f = characteristic_step(interval(0, F(1, 2)))
        assert d_prime(f, f) == 0

    def test_disagreement(self):
        f = characteristic_step(interval(0, F(1, 2)))
        g = characteristic_step(interval(F(1, 4), F(3, 4)))
        assert d_prime(f, g) == F(1, 2)

    def test_constants(self):
        assert d_prime(StepFunction.constant("a"), StepFunction.constant("b")) == 1

    @given(step_functions(), step_functions())
    def test_formulas_agree(self, f, g):
        assert d_prime_refinement(f, g) == d_prime_half_sum(f, g)

    @given(step_functions(), step_functions(), step_functions())
    def test_triangle(self, f, g, h):
        assert d_prime(f, h) <= d_prime(f, g) + d_prime(g, h)

    @given(step_functions(), step_functions())
    def test_per_label_bound(self, f, g):
        for label in set(f.labels) | set(g.labels):
            assert metric_d(f.part(label), g.part(label)) <= 2 * d_prime(f, g)


class TestLift:
    def test_add_mod_two(self, z2):
        f = characteristic_step(interval(0, F(1, 2)))
        g = characteristic_step(interval(F(1, 4), F(3, 4)))
        expected = characteristic_step(from_pairs([(0, F(1, 4)), (F(1, 2), F(3, 4))]))
        assert lift_op(z2, "add", f, g) == expected

    def test_mul_mod_two(self, z2):
        f = characteristic_step(interval(0, F(1, 2)))
        g = characteristic_step(interval(F(1, 4), F(3, 4)))
        assert lift_op(z2, "mul", f, g) == characteristic_step(interval(F(1, 4), F(1, 2)))

    def test_unary_identity(self, z2):
        # negation is the identity in Z/2Z
        f = characteristic_step(interval(F(1, 3), F(2, 3)))
        assert lift_op(z2, "neg", f) == f

    def test_arity(self, z2):
        with pytest.raises(ArityMismatchError):
            lift_op(z2, "add", StepFunction.constant("1"))

    @settings(max_examples=50)
    @given(step_functions(Z6), step_functions(Z6), step_functions(Z6), step_functions(Z6))
    def test_lipschitz_in_each_argument(self, f, g, f2, g2):
        z6 = cyclic_ring(6)
        for op in ("add", "mul"):
            lhs = d_prime(lift_op(z6, op, f, g), lift_op(z6, op, f2, g2))
            assert lhs <= d_prime(f, f2) + d_prime(g, g2)

    def test_refinement_cells_partition(self):
        f = characteristic_step(interval(0, F(1, 2)))
        g = characteristic_step(interval(F(1, 4), F(3, 4)))
        cells = common_refinement([f, g])
        assert len(cells) == 4
        assert sum(measure(c) for c, _ in cells) == 1


class TestPartitions:
    def test_exact_partition_unchanged(self):
        parts = [interval(0, F(1, 2)), interval(F(1, 2), 1)]
        assert normalize_partition(parts) == parts

    def test_deficit_goes_to_first(self):
        t0, t1 = normalize_partition([interval(0, F(1, 2)), interval(F(1, 2), F(3, 4))])
        assert t1 == interval(F(1, 2), F(3, 4))
        assert t0 == from_pairs([(0, F(1, 2)), (F(3, 4), 1)])

    def test_overlap_removed(self):
        t0, t1 = normalize_partition([interval(0, F(1, 2)), interval(F(1, 4), 1)])
        assert (t0, t1) == (interval(0, F(1, 2)), interval(F(1, 2), 1))

    def test_assemble(self):
        f = assemble_limit([("a", interval(0, F(1, 2))), ("b", interval(F(1, 2), 1))])
        assert f == StepFunction.from_mapping({"a": interval(0, F(1, 2)), "b": interval(F(1, 2), 1)})

    def test_assemble_constant(self):
        assert assemble_limit([("a", UNIT_SET)]) == StepFunction.constant("a")

    def test_assemble_deficit(self):
        with pytest.raises(PartitionError) as info:
            assemble_limit([("a", interval(0, F(1, 2))), ("b", interval(F(1, 2), F(3, 4)))])
        assert info.value.deficit == F(1, 4)

    def test_assemble_overlap(self):
        with pytest.raises(PartitionError) as info:
            assemble_limit([("a", interval(0, F(3, 4))), ("b", interval(F(1, 2), 1))])
        assert info.value.overlap[:2] == ("a", "b")


class TestRingBisection:
    def test_characteristic_functions(self):
        assert characteristic_step(UNIT_SET) == StepFunction.constant("1")
        assert characteristic_step(EMPTY) == StepFunction.constant("0")
        assert characteristic_step(interval(0, F(1, 2))).value_at(F(1, 2)) == "0"

    def test_characteristic_function_in_zero_ring(self):
        assert characteristic_step(interval(0, F(1, 2)), "0", "0") == StepFunction.constant("0")

    def test_zero_ring_distance(self):
        z1 = cyclic_ring(1)
        assert astar_distance_to_one(UNIT_SET, z1) == 0
        u = astar_bisection_step(UNIT_SET, z1, AlwaysLeft())
        assert astar_distance_to_one(u, z1) == 0

    def test_left_step(self, z6):
        assert astar_bisection_step(UNIT_SET, z6, AlwaysLeft()) == interval(0, F(1, 2))

    def test_quarter(self, z6):
        u = astar_bisection_step(interval(F(1, 2), 1), z6, SeededOracle(1))
        assert measure(u) == F(1, 4)

    @pytest.mark.parametrize("seed", range(5))
    def test_distance_ladder(self, z6, seed):
        oracle = SeededOracle(seed)
        u = UNIT_SET
        assert astar_distance_to_one(u, z6) == 1
        for n in range(1, 12):
            u = astar_bisection_step(u, z6, oracle)
            assert astar_distance_to_one(u, z6) == F(1, 2**n)

    def test_needs_ring(self):
        alg = FiniteAlgebra.from_description({"carrier": ["x"], "ops": {"id": {"arity": 1, "table": ["x"]}}})
        with pytest.raises(AlgebraError):
            astar_distance_to_one(UNIT_SET, alg)
