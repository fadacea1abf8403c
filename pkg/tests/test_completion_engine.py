from fractions import Fraction as F

import pytest

from app.completion_engine import (
    FAMILIES,
    JOIN_STEP,
    STEP_TARGET,
    InjectedOracle,
    MonotoneLimitOracle,
    StabilizationOracle,
    approx_limit,
    complete_step_sequence,
    corrupt_run,
    full_tlat_pipeline,
    increasing_sets_scenario,
    inequality_table,
    run_scenario,
    running_join,
    step_function_scenario,
    typewriter_scenario,
    verify_run,
)
from app.counterexamples import DiameterCarrier, harmonic_space, subset
from app.errors import HorizonExceededError, WeakCarrierError
from app.interval_sets import EMPTY, interval, metric_d
from app.metrized_lattice import GapCertificate

HORIZON = 12


def shrinking(carrier):
    """[0, 2^-i) with its exact geometric certificate."""
    return GapCertificate.geometric(carrier, lambda i: interval(0, F(1, 2**i)), first_gap=F(1, 2), name="shrinking")


def settling(carrier):
    """[0, 1 - 2^-min(i,3)): constant from index 3 on."""
    return GapCertificate.geometric(
        carrier, lambda i: interval(0, 1 - F(1, 2 ** min(i, 3))) if i else EMPTY, first_gap=F(1, 2), name="settling"
    )


class TestRunningJoin:
    def test_single_term(self, unit_lattice):
        cert = shrinking(unit_lattice)
        assert running_join(cert, 4, 4) == cert.term(4)

    def test_nested_sets(self, unit_lattice):
        cert = shrinking(unit_lattice)
        memo = {}
        for h in range(5):
            for j in range(h, 8):
                assert running_join(cert, h, j, memo) == interval(0, F(1, 2**h))

    def test_antichain(self, unit_lattice):
        halves = [interval(0, F(1, 2)), interval(F(1, 2), 1)]
        cert = GapCertificate.geometric(unit_lattice, lambda i: halves[i % 2])
        assert running_join(cert, 0, 1) == interval(0, 1)

    def test_memo_extends_prefix(self, unit_lattice):
        cert = shrinking(unit_lattice)
        memo = {}
        running_join(cert, 2, 5, memo)
        assert {(2, j) for j in range(2, 6)} <= set(memo)

    def test_reversed_indices(self, unit_lattice):
        with pytest.raises(ValueError):
            running_join(shrinking(unit_lattice), 3, 2)


class TestApproxLimit:
    def test_constant(self, unit_lattice):
        value = interval(F(1, 3), F(2, 3))
        result = approx_limit(GapCertificate.constant(unit_lattice, value), F(1, 100), horizon=5)
        assert (result.element, result.h, result.bound) == (value, 0, 0)

    def test_typewriter_epsilon(self):
        cert = typewriter_scenario("join").certificate
        result = approx_limit(cert, F(1, 256), horizon=HORIZON)
        assert result.h == 9
        assert result.element == interval(0, F(1, 512))
        assert result.bound == F(1, 256)
        assert metric_d(result.element, EMPTY) <= result.bound
        assert result.certified

    def test_increasing_sets(self):
        cert = increasing_sets_scenario("join").certificate
        result = approx_limit(cert, F(1, 8), horizon=HORIZON)
        assert result.j == HORIZON
        assert result.element == interval(0, 1 - F(1, 2**HORIZON))
        for m in range(result.h, result.j + 1):
            assert metric_d(cert.term(m), result.element) <= result.bound

    def test_horizon_too_short(self, unit_lattice):
        with pytest.raises(HorizonExceededError) as info:
            approx_limit(shrinking(unit_lattice), F(1, 2**20), horizon=5)
        assert info.value.horizon == 5

    def test_epsilon_positive(self, unit_lattice):
        with pytest.raises(ValueError):
            approx_limit(shrinking(unit_lattice), 0)


class TestOracles:
    def test_default_oracle_knows_nothing(self):
        oracle = MonotoneLimitOracle()
        assert oracle.increasing_limit(lambda j: EMPTY, row=0) is None
        assert oracle.decreasing_limit(lambda h: EMPTY) is None

    def test_stabilization(self):
        oracle = StabilizationOracle(window=3, horizon=10)
        assert oracle.increasing_limit(lambda j: min(j, 5), row=0) == 5
        assert oracle.decreasing_limit(lambda h: h) is None

    def test_injected_falls_back(self):
        oracle = InjectedOracle(increasing=lambda row: "row", fallback=StabilizationOracle(window=2))
        assert oracle.increasing_limit(lambda j: 0, row=3) == "row"
        assert oracle.decreasing_limit(lambda h: 7) == 7

    def test_injected_empty_limit(self):
        assert InjectedOracle(decreasing=EMPTY).decreasing_limit(lambda h: interval(0, 1)) == EMPTY


class TestPipeline:
    def test_settling_sequence(self, unit_lattice):
        run = full_tlat_pipeline(settling(unit_lattice), StabilizationOracle(), horizon=HORIZON)
        assert run.final_limit == interval(0, F(7, 8))
        assert verify_run(run).passed

    def test_typewriter_limit(self):
        scenario = typewriter_scenario("join")
        run = full_tlat_pipeline(scenario.certificate, scenario.oracle, horizon=HORIZON, known_limit=EMPTY)
        assert run.final_limit == EMPTY
        for h in range(HORIZON + 1):
            assert run.row_limits[h] == interval(0, F(1, 2**h))
            assert metric_d(run.certificate.term(h), EMPTY) == F(1, 2**h) <= run.bound_at(h)
        assert run.error_bound == 2
        report = verify_run(run)
        assert report.passed
        assert report.checked > 0

    def test_every_family_is_checked(self):
        scenario = typewriter_scenario("join")
        run = full_tlat_pipeline(scenario.certificate, scenario.oracle, horizon=6, known_limit=EMPTY)
        table = inequality_table(run)
        assert [row.name for row in table] == list(FAMILIES)
        assert all(row.ok for row in table)

    def test_unavailable_limit(self, unit_lattice):
        run = full_tlat_pipeline(shrinking(unit_lattice), MonotoneLimitOracle(), horizon=10)
        assert run.final_limit is None
        assert run.row_limits == {}
        assert run.approx is not None

    def test_weak_carrier_refused(self):
        space = harmonic_space(3)
        cert = GapCertificate.constant(DiameterCarrier(space), subset(1))
        with pytest.raises(WeakCarrierError):
            full_tlat_pipeline(cert, InjectedOracle(), horizon=3)

    def test_corrupted_run_names_family(self):
        scenario = typewriter_scenario("join")
        run = full_tlat_pipeline(scenario.certificate, scenario.oracle, horizon=6)
        report = verify_run(corrupt_run(run))
        assert not report.passed
        assert JOIN_STEP in {v.inputs[0] for v in report.violations}
        # the original run is untouched
        assert verify_run(run).passed


class TestDuality:
    @pytest.mark.parametrize("build", [typewriter_scenario, increasing_sets_scenario])
    def test_dual_scenarios(self, build):
        scenario = build("dual")
        run = full_tlat_pipeline(scenario.certificate, scenario.oracle, horizon=HORIZON, known_limit=scenario.known_limit)
        assert run.final_limit == scenario.known_limit
        assert verify_run(run).passed

    def test_dual_running_join_is_intersection(self):
        cert = typewriter_scenario("dual").certificate
        assert running_join(cert, 1, 4) == interval(0, F(1, 16))

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            typewriter_scenario("sideways")


class TestStepFunctions:
    @pytest.mark.parametrize("mode", ["join", "dual"])
    def test_assembled_limit(self, mode):
        scenario = step_function_scenario(mode)
        completion = complete_step_sequence(
            scenario.certificate, scenario.labels, scenario.oracles, horizon=8, carrier=scenario.carrier
        )
        assert completion.limit == STEP_TARGET
        for run in completion.runs.values():
            assert verify_run(run).passed

    def test_certificate_holds(self):
        assert step_function_scenario().certificate.verify(16).passed


class TestScenarios:
    @pytest.mark.parametrize("name", ["typewriter", "increasing_sets", "step_function"])
    @pytest.mark.parametrize("mode", ["join", "dual"])
    def test_all_pass(self, name, mode):
        outcome = run_scenario(name, mode, horizon=10)
        assert outcome.report.passed
        assert outcome.transcript.finalLimit is not None

    def test_typewriter_transcript(self):
        transcript = run_scenario("typewriter", horizon=HORIZON).transcript
        assert transcript.finalLimit == []
        assert transcript.indices[:4] == [1, 2, 7, 29]
        assert transcript.gapBounds[:3] == ["1/2", "1/4", "1/8"]
        assert transcript.joins["1,3"] == [["0", "1/2"]]
        assert transcript.approx.bound == "1/256"
        assert transcript.approx.element == [["0", "1/512"]]

    def test_step_transcript_labels_families(self):
        transcript = run_scenario("step_function", horizon=6).transcript
        assert {row.name.split(":")[0] for row in transcript.checkedInequalities} == {"a", "b", "c"}

    def test_corrupt_flag(self):
        outcome = run_scenario("typewriter", horizon=6, corrupt=True)
        assert not outcome.report.passed

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            run_scenario("nope")
