import random
from fractions import Fraction

from app import sampling
from app.algebra_star import astar_bisection_step, astar_distance_to_one, cyclic_ring
from app.config import RunConfig
from app.interval_sets import EMPTY, find_halving_point, format_rational, interval, measure, metric_d, to_json_value, union
from app.measure_algebra import (
    BElement,
    SeededOracle,
    approach_one,
    bisection_ladder,
    closure_witness,
    halve,
    membership_count,
    row_start,
    stretched_term_index,
    stretched_typewriter,
    typewriter,
    typewriter_modulus,
)
from app.metrized_lattice import IntervalSetCarrier, check_sequence_follows_subsequence, extract_fast_subsequence
from app.models import CheckReport, SuiteResult, Violation
from app.suites.common import collect

ORACLES = 100
MAX_STEPS = 20
FAST_STEPS = 20
# the terms between picks 0 and 6 fill rows 2..127 of the typewriter, about 8k terms
WHOLE_SEQUENCE_STEPS = 6


def _mismatch(report: CheckReport, inputs, lhs, rhs) -> None:
    report.violations.append(Violation(inputs=list(inputs), lhs=str(lhs), rhs=str(rhs)))


def run_halving(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Halving points split a set into two halves of equal measure, at the smallest such point."""
    report = CheckReport(name="halving")
    for _ in range(max(1, config.samples // 10)):
        u = sampling.interval_set(rng)
        if not u:
            continue
        report.checked += 1
        t = find_halving_point(u)
        left, right = halve(u)
        half = measure(u) / 2
        ok = (
            measure(left) == half
            and measure(right) == half
            and not (left & right)
            and union(left, right) == u
            and left.sup == t
        )
        if not ok:
            _mismatch(report, [to_json_value(u)], format_rational(measure(left)), format_rational(half))
    return collect("halving", [report])


def run_typewriter(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Typewriter terms, row measures, row covering, the stretched variant and a fast subsequence."""
    terms = CheckReport(name="typewriter_terms")
    checks = {
        1: interval(0, 1),
        2: interval(0, Fraction(1, 2)),
        3: interval(Fraction(1, 2), 1),
        5: interval(Fraction(1, 3), Fraction(2, 3)),
    }
    for k, expected in checks.items():
        terms.checked += 1
        if typewriter(k).set != expected:
            _mismatch(terms, [k], typewriter(k), expected)

    rows = CheckReport(name="row_measures")
    for n in range(1, config.rows + 1):
        for k in range(row_start(n), row_start(n + 1)):
            rows.checked += 1
            s = typewriter(k).set
            if measure(s) != Fraction(1, n) or metric_d(s, EMPTY) != Fraction(1, n):
                _mismatch(rows, [k, n], format_rational(measure(s)), f"1/{n}")

    covering = CheckReport(name="row_covering")
    sample_points = list(config.points) + [Fraction(rng.randrange(97), 97) for _ in range(5)]
    for t in sample_points:
        covering.checked += 1
        count = membership_count(t, config.rows)
        if count != config.rows:
            _mismatch(covering, [format_rational(t), config.rows], count, config.rows)

    stretched = CheckReport(name="stretched")
    for k in range(1, 64):
        stretched.checked += 1
        m = stretched_term_index(k)
        # term m fills positions 2^m - 1 .. 2^(m+1) - 2
        if not (2**m - 1 <= k <= 2 ** (m + 1) - 2) or stretched_typewriter(k) != typewriter(m):
            _mismatch(stretched, [k], m, "position range")

    carrier = IntervalSetCarrier()
    cert = extract_fast_subsequence(
        carrier, lambda k: typewriter(k).set, typewriter_modulus, horizon=FAST_STEPS, name="typewriter"
    )
    fast = cert.verify(FAST_STEPS)
    fast.name = "fast_subsequence_gaps"
    limit = CheckReport(name="fast_subsequence_limit")
    for i in range(FAST_STEPS + 1):
        limit.checked += 1
        dist = carrier.dist(cert.term(i), EMPTY)
        if dist > 2 * cert.tail(i):
            _mismatch(limit, [i], format_rational(dist), format_rational(2 * cert.tail(i)))

    # every term between consecutive picks, not just the picks, is within 2^-i of ∅
    whole = check_sequence_follows_subsequence(
        cert, lambda k: typewriter(k).set, EMPTY, WHOLE_SEQUENCE_STEPS, bound=lambda i: Fraction(1, 2**i)
    )
    return collect(
        "typewriter",
        [terms, rows, covering, stretched, fast, limit, whole],
        detail={"fast_indices": [cert.source_index(i) for i in range(6)]},
    )


def run_bisection(config: RunConfig, rng: random.Random) -> SuiteResult:
    """For many chooser oracles the distance to 1 halves at every step, in B and in A* over Z/6Z."""
    ladder = CheckReport(name="bisection_ladder")
    astar = CheckReport(name="astar_ladder")
    closure = CheckReport(name="closure_witness")
    ring = cyclic_ring(6)
    unit = interval(0, 1)
    for _ in range(ORACLES):
        seed = rng.randrange(2**32)
        for step, u, dist in bisection_ladder(unit, SeededOracle(seed), MAX_STEPS):
            ladder.checked += 1
            if dist != Fraction(1, 2**step):
                _mismatch(ladder, [seed, step], format_rational(dist), f"1/{2**step}")

        oracle = SeededOracle(seed)
        u = unit
        for step in range(MAX_STEPS + 1):
            if step:
                u = astar_bisection_step(u, ring, oracle)
            astar.checked += 1
            dist = astar_distance_to_one(u, ring)
            if dist != Fraction(1, 2**step) or measure(u) != dist:
                _mismatch(astar, [seed, step], format_rational(dist), f"1/{2**step}")

        v = BElement(sampling.interval_set(rng))
        near, dist, bound = closure_witness(v, unit, SeededOracle(seed), MAX_STEPS)
        closure.checked += 1
        if dist > bound:
            _mismatch(closure, [seed, to_json_value(v.set)], format_rational(dist), format_rational(bound))

    _, final = approach_one(unit, SeededOracle(0), config.steps)
    return collect(
        "bisection",
        [ladder, astar, closure],
        detail={"steps": config.steps, "final_distance": format_rational(final)},
    )
