import random
from fractions import Fraction

from app import sampling
from app.algebra_star import cyclic_ring
from app.config import RunConfig
from app.interval_sets import UNBOUNDED, format_rational, metric_d, to_json_value
from app.measure_algebra import BElement, ring_add, ring_mul
from app.metrized_lattice import IntervalSetCarrier, StepFunctionSpace, check_metric_axioms
from app.models import CheckReport, SuiteResult, Violation
from app.suites.common import collect

CAPS = (Fraction(1, 2), Fraction(1), Fraction(3))


def run_metric_axioms(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Metric axioms for d on [0,1), for d_C on sets in [0,3), and for d' on step functions."""
    n = config.samples
    reports = [
        check_metric_axioms(
            IntervalSetCarrier(),
            (sampling.interval_set_tuple(rng, 3) for _ in range(n)),
            name="d",
        )
    ]
    for cap in CAPS:
        reports.append(
            check_metric_axioms(
                IntervalSetCarrier(cap, ambient=UNBOUNDED),
                (sampling.interval_set_tuple(rng, 3, hi=3) for _ in range(n)),
                name=f"d_C[C={format_rational(cap)}]",
            )
        )
    labels = cyclic_ring(6).carrier
    reports.append(
        check_metric_axioms(
            StepFunctionSpace(),
            (tuple(sampling.step_function(rng, labels) for _ in range(3)) for _ in range(max(1, n // 10))),
            name="d_prime",
        )
    )
    return collect("metric-axioms", reports)


def run_ring_continuity(config: RunConfig, rng: random.Random) -> SuiteResult:
    """Translation by U is an isometry; multiplication by U is 1-Lipschitz; a·a = a."""
    translation = CheckReport(name="add_isometry")
    contraction = CheckReport(name="mul_lipschitz")
    idempotent = CheckReport(name="no_nilpotents")
    for _ in range(config.samples):
        s, t, u = (BElement(x) for x in sampling.interval_set_tuple(rng, 3))
        base = metric_d(s.set, t.set)

        translation.checked += 1
        moved = metric_d(ring_add(s, u).set, ring_add(t, u).set)
        if moved != base:
            translation.violations.append(
                Violation(inputs=[to_json_value(x.set) for x in (s, t, u)], lhs=format_rational(moved), rhs=format_rational(base))
            )

        contraction.checked += 1
        shrunk = metric_d(ring_mul(s, u).set, ring_mul(t, u).set)
        if shrunk > base:
            contraction.violations.append(
                Violation(inputs=[to_json_value(x.set) for x in (s, t, u)], lhs=format_rational(shrunk), rhs=format_rational(base))
            )

        if s.set:
            idempotent.checked += 1
            square = ring_mul(s, s)
            if square != s or not square.set:
                idempotent.violations.append(Violation(inputs=[to_json_value(s.set)], lhs=repr(square), rhs=repr(s)))
    return collect("ring-continuity", [translation, contraction, idempotent])
