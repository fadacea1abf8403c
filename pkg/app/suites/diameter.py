import itertools
import random
from fractions import Fraction
from typing import List

from app import sampling
from app.config import RunConfig
from app.counterexamples import (
    EMPTY_SUBSET,
    NOT_ISOLATED,
    DiameterCarrier,
    FiniteSubset,
    LPrimeCarrier,
    PointSpace,
    check_increasing_gap,
    check_singleton_isometry,
    encode_subset,
    find_dv_violation,
    harmonic_point,
    harmonic_space,
    isolation_radius,
    join_discontinuity_witness,
    lprime_elements,
    nonconvergence_check,
    split_weak_meet_by_overlap,
    subsets,
)
from app.interval_sets import format_rational
from app.metrized_lattice import IntervalSetCarrier, check_chain_bound, check_metric_axioms, check_weak_join
from app.models import CheckReport, SuiteResult, Violation
from app.suites.common import collect, expect_witness

SMALL = PointSpace((Fraction(0), Fraction(1), Fraction(10)))
HARMONIC_N = 6


def _spaces() -> List[PointSpace]:
    return [SMALL, harmonic_space(HARMONIC_N)]


def run_diameter_metric(config: RunConfig, rng: random.Random) -> SuiteResult:
    """d_L and d_L' are metrics, exhaustively on {0,1,10}; singletons embed isometrically."""
    reports = []
    family = subsets(SMALL, config.size_cap)
    reports.append(check_metric_axioms(DiameterCarrier(SMALL), itertools.product(family, repeat=3), name="d_L"))
    lprime = LPrimeCarrier(SMALL)
    reports.append(
        check_metric_axioms(lprime, itertools.product(lprime_elements(SMALL, config.size_cap), repeat=3), name="d_L_prime")
    )
    # the larger space is sampled rather than exhausted
    big = subsets(harmonic_space(HARMONIC_N), config.size_cap)
    reports.append(
        check_metric_axioms(
            DiameterCarrier(harmonic_space(HARMONIC_N)),
            (tuple(rng.choice(big) for _ in range(3)) for _ in range(max(1, config.samples // 10))),
            name="d_L_harmonic",
        )
    )
    reports.extend(check_singleton_isometry(space) for space in _spaces())
    return collect("diameter-metric", reports)


def run_weak_join(config: RunConfig, rng: random.Random) -> SuiteResult:
    """d_L(S, S∪T) <= d_L(S, T) for every pair of subsets up to the size cap."""
    reports = []
    for space in _spaces():
        family = subsets(space, config.size_cap)
        report = check_weak_join(DiameterCarrier(space), itertools.product(family, repeat=2))
        reports.append(report.model_copy(update={"name": f"weak_join[{space.name}]"}))
    return collect("weak-join", reports)


def run_dv_witness(config: RunConfig, rng: random.Random) -> SuiteResult:
    """The Lipschitz join inequality must fail on {0,1,10}."""
    witness = find_dv_violation(SMALL, config.size_cap)
    return expect_witness(
        "dv-witness",
        None if witness is None else witness.model_dump(),
        checked=len(subsets(SMALL, config.size_cap)) ** 3,
        detail={"space": SMALL.name},
    )


def run_weak_meet_lprime(config: RunConfig, rng: random.Random) -> SuiteResult:
    """In L' the weak meet inequality holds on intersecting pairs and fails on some disjoint pair."""
    split = split_weak_meet_by_overlap(LPrimeCarrier(harmonic_space(HARMONIC_N)), config.size_cap)
    witness = None
    if split.intersecting.passed and split.disjoint.violations:
        witness = split.disjoint.violations[0].model_dump()
    result = expect_witness(
        "weak-meet-lprime",
        witness,
        checked=split.intersecting.checked + split.disjoint.checked,
        detail={
            "intersecting": {"checked": split.intersecting.checked, "violations": len(split.intersecting.violations)},
            "disjoint": {"checked": split.disjoint.checked, "violations": len(split.disjoint.violations)},
        },
    )
    result.violations = split.intersecting.violations
    return result


def run_nonconvergence(config: RunConfig, rng: random.Random) -> SuiteResult:
    """The singletons {1/(i+1)} are Cauchy in L and approach no candidate."""
    space = harmonic_space(HARMONIC_N)
    # every subset of the window, plus the singleton of every term of the sequence
    singles = [FiniteSubset((harmonic_point(i),)) for i in range(config.horizon)]
    candidates = list(dict.fromkeys([*subsets(space, config.size_cap), *singles]))
    report = nonconvergence_check(candidates, terms=config.horizon)
    return collect("nonconvergence", [report], detail={"candidates": len(candidates), "terms": config.horizon})


def run_join_discontinuity(config: RunConfig, rng: random.Random) -> SuiteResult:
    """{1/(i+1)} -> {0} while {1/(i+1), 1} keeps distance at least 1 from {0, 1}."""
    xs = [harmonic_point(i) for i in range(config.horizon)]
    space = PointSpace((*xs, Fraction(0)), limit_points=frozenset({Fraction(0)}))
    record = join_discontinuity_witness(xs, Fraction(0), Fraction(1), space)
    result = collect(
        "join-discontinuity",
        [record.report],
        detail={
            "gap": record.gap,
            "last_singleton_distance": record.singleton_distances[-1],
            "min_pair_distance": min(record.pair_distances, key=Fraction),
        },
    )
    if not record.discontinuous:
        result.passed = False
        result.error = "join stayed continuous along the sequence"
    return result


def run_isolation(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Every element of L' over a discrete space is isolated; 0 in {1/n} ∪ {0} is not."""
    report = CheckReport(name="isolation")
    space = harmonic_space(HARMONIC_N)
    for element in lprime_elements(space, config.size_cap):
        report.checked += 1
        radius = isolation_radius(element, space)
        if radius is NOT_ISOLATED or radius <= 0:
            report.violations.append(Violation(inputs=[encode_subset(element)], lhs=str(radius), rhs="0"))

    accumulating = harmonic_space(HARMONIC_N, include_zero=True)
    report.checked += 1
    if isolation_radius(FiniteSubset((Fraction(0),)), accumulating) is not NOT_ISOLATED:
        report.violations.append(Violation(inputs=[["0"]], lhs="isolated", rhs="not isolated"))

    third = isolation_radius(FiniteSubset((Fraction(1, 3),)), space)
    report.checked += 1
    if third != Fraction(1, 12):
        report.violations.append(Violation(inputs=[["1/3"]], lhs=str(third), rhs="1/12"))
    return collect(
        "isolation",
        [report],
        detail={"empty_radius": format_rational(isolation_radius(EMPTY_SUBSET, space))},
    )


def _increasing_chain(rng: random.Random, points) -> List[FiniteSubset]:
    order = list(points)
    rng.shuffle(order)
    length = rng.randint(2, len(order))
    return [FiniteSubset.of(order[: i + 1]) for i in range(length)]


def run_chain_bound(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Prefix joins stay within the summed gaps; increasing chains in L never settle down."""
    n = max(1, config.samples // 100)
    interval_report = CheckReport(name="chain_bound[interval_sets]")
    lattice = IntervalSetCarrier()
    for _ in range(n):
        chain = [sampling.interval_set(rng) for _ in range(rng.randint(1, 8))]
        interval_report = interval_report.merge(check_chain_bound(lattice, chain))

    space = harmonic_space(HARMONIC_N)
    family = subsets(space, config.size_cap)
    diameter_report = CheckReport(name="chain_bound[diameter]")
    gap_report = CheckReport(name="increasing_gap")
    carrier = DiameterCarrier(space)
    for _ in range(n):
        chain = [rng.choice(family) for _ in range(rng.randint(1, 6))]
        diameter_report = diameter_report.merge(check_chain_bound(carrier, chain))
        gap_report = gap_report.merge(check_increasing_gap(_increasing_chain(rng, space.points), space))
    return collect("chain-bound", [interval_report, diameter_report, gap_report])
