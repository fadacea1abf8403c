import itertools
import random
from fractions import Fraction
from typing import List

from app import sampling
from app.algebra_star import (
    UNIT_SET,
    cyclic_ring,
    d_prime,
    d_prime_half_sum,
    d_prime_refinement,
    lift_op,
    normalize_partition,
    step_to_json_value,
)
from app.config import RunConfig
from app.interval_sets import IntervalSet, format_rational, intersect, measure, metric_d, to_json_value, union_all
from app.models import CheckReport, SuiteResult, Violation
from app.suites.common import collect

RING_ORDER = 6


def _violation(inputs, lhs: Fraction, rhs: Fraction) -> Violation:
    return Violation(inputs=list(inputs), lhs=format_rational(lhs), rhs=format_rational(rhs))


def run_lipschitz_lift(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Lifted add and mul over Z/6Z move at most the summed d' of their arguments."""
    ring = cyclic_ring(RING_ORDER)
    labels = ring.carrier
    formulas = CheckReport(name="d_prime_formulas")
    components = CheckReport(name="component_bound")
    reports: List[CheckReport] = []
    for op in ("add", "mul"):
        report = CheckReport(name=f"lipschitz_{op}")
        for _ in range(max(1, config.samples // 10)):
            f1, f2, g1, g2 = (sampling.step_function(rng, labels) for _ in range(4))
            report.checked += 1
            lhs = d_prime(lift_op(ring, op, f1, f2), lift_op(ring, op, g1, g2))
            rhs = d_prime(f1, g1) + d_prime(f2, g2)
            if lhs > rhs:
                report.violations.append(
                    _violation([op, *(step_to_json_value(f) for f in (f1, f2, g1, g2))], lhs, rhs)
                )

            formulas.checked += 1
            by_cells, by_labels = d_prime_refinement(f1, g1), d_prime_half_sum(f1, g1)
            if by_cells != by_labels:
                formulas.violations.append(_violation([step_to_json_value(f1), step_to_json_value(g1)], by_cells, by_labels))

            whole = d_prime(f2, g2)
            for x in labels:
                components.checked += 1
                part = metric_d(f2.part(x), g2.part(x))
                if part > whole:
                    components.violations.append(_violation([x, step_to_json_value(f2), step_to_json_value(g2)], part, whole))
        reports.append(report)
    return collect("lipschitz-lift", [*reports, formulas, components])


def run_identities(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Commutative ring identities of Z/6Z hold for the lifted operations."""
    ring = cyclic_ring(RING_ORDER)
    labels = ring.carrier
    report = CheckReport(name="ring_identities")

    def lift(op, *args):
        return lift_op(ring, op, *args)

    laws = {
        "add_commutative": lambda f, g, h: (lift("add", f, g), lift("add", g, f)),
        "mul_commutative": lambda f, g, h: (lift("mul", f, g), lift("mul", g, f)),
        "add_associative": lambda f, g, h: (lift("add", lift("add", f, g), h), lift("add", f, lift("add", g, h))),
        "mul_associative": lambda f, g, h: (lift("mul", lift("mul", f, g), h), lift("mul", f, lift("mul", g, h))),
        "distributive": lambda f, g, h: (lift("mul", f, lift("add", g, h)), lift("add", lift("mul", f, g), lift("mul", f, h))),
        "additive_inverse": lambda f, g, h: (lift("add", f, lift("neg", f)), lift("add", g, lift("neg", g))),
    }
    for _ in range(max(1, config.samples // 20)):
        f, g, h = (sampling.step_function(rng, labels) for _ in range(3))
        for name, law in laws.items():
            report.checked += 1
            left, right = law(f, g, h)
            if left != right:
                report.violations.append(
                    Violation(inputs=[name, *(step_to_json_value(x) for x in (f, g, h))], lhs=repr(left), rhs=repr(right))
                )
    return collect("identities", [report])


def _partitions_unit(parts: List[IntervalSet]) -> bool:
    if any(intersect(a, b) for a, b in itertools.combinations(parts, 2)):
        return False
    return union_all(parts) == UNIT_SET


def run_partition(config: RunConfig, rng: random.Random) -> SuiteResult:
    """normalize_partition always yields a partition; valid candidates come back unchanged."""
    valid = CheckReport(name="valid_candidates")
    deficient = CheckReport(name="deficient_candidates")
    overlapping = CheckReport(name="overlapping_candidates")
    n = max(1, config.samples // 10)
    for _ in range(n):
        sets = sampling.partition_candidate(rng)
        parts = normalize_partition(sets)
        valid.checked += 1
        drift = sum((metric_d(s, t) for s, t in zip(sets, parts)), Fraction(0))
        if not _partitions_unit(parts) or drift != 0:
            valid.violations.append(_violation([to_json_value(s) for s in sets], drift, Fraction(0)))

        sets = sampling.deficient_candidate(rng)
        parts = normalize_partition(sets)
        deficient.checked += 1
        deficit = 1 - sum((measure(s) for s in sets), Fraction(0))
        landed = measure(parts[0]) - measure(sets[0])
        if not _partitions_unit(parts) or landed != deficit or parts[1:] != sets[1:]:
            deficient.violations.append(_violation([to_json_value(s) for s in sets], landed, deficit))

        sets = sampling.overlapping_candidate(rng)
        parts = normalize_partition(sets)
        overlapping.checked += 1
        if not _partitions_unit(parts):
            overlapping.violations.append(
                Violation(inputs=[to_json_value(s) for s in sets], lhs="not a partition", rhs="partition")
            )
    return collect("partition", [valid, deficient, overlapping])
