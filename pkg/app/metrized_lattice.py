"""Metrized (semi)lattices and exact checkers for their inequality hypotheses.

A carrier bundles a metric with join (and possibly meet) and records which of
the four inequalities it is known to satisfy:

    join_lipschitz   d(x∨y, x∨z) <= d(y, z)
    meet_lipschitz   d(x∧y, x∧z) <= d(y, z)
    weak_join        d(x, x∨y)   <= d(x, y)
    weak_meet        d(x, x∧y)   <= d(x, y)

The order is derived: a <= b iff a ∨ b == b. Every checker compares exact
rationals and returns a CheckReport listing each violating input.

Sequences are index accessors. A GapCertificate pairs one with bounds on
consecutive distances and a closed-form tail, so statements about infinite
sequences are verified on every materialized index and carried by the tail
beyond it.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Generic, Iterable, List, Optional, Protocol, Sequence, Tuple, TypeVar

from app.algebra_star import StepFunction, d_prime, step_to_json_value
from app.errors import ContractBreachError
from app.interval_sets import (
    UNIT,
    Ambient,
    IntervalSet,
    format_rational,
    intersect,
    metric_d,
    metric_dC,
    to_json_value,
    to_rational,
    union,
)
from app.logger import get_logger
from app.models import CheckReport, Violation

logger = get_logger(__name__)

T = TypeVar("T")

DEFAULT_HORIZON = 64


class Hypothesis(str, enum.Enum):
    JOIN_LIPSCHITZ = "join_lipschitz"
    MEET_LIPSCHITZ = "meet_lipschitz"
    WEAK_JOIN = "weak_join"
    WEAK_MEET = "weak_meet"


_DUAL = {
    Hypothesis.JOIN_LIPSCHITZ: Hypothesis.MEET_LIPSCHITZ,
    Hypothesis.MEET_LIPSCHITZ: Hypothesis.JOIN_LIPSCHITZ,
    Hypothesis.WEAK_JOIN: Hypothesis.WEAK_MEET,
    Hypothesis.WEAK_MEET: Hypothesis.WEAK_JOIN,
}


class MetricCarrier(Protocol[T]):
    name: str
    hypotheses: FrozenSet[Hypothesis]

    def dist(self, a: T, b: T) -> Fraction: ...

    def encode(self, a: T) -> Any: ...


class MetrizedJoinCarrier(MetricCarrier[T], Protocol[T]):
    def join(self, a: T, b: T) -> T: ...


class MetrizedLatticeCarrier(MetrizedJoinCarrier[T], Protocol[T]):
    def meet(self, a: T, b: T) -> T: ...


class IntervalSetCarrier:
    """Interval sets under union/intersection with d, or with d_C when a cap is given."""

    hypotheses = frozenset(Hypothesis)

    def __init__(self, cap: Optional[Fraction | str | int] = None, ambient: Ambient = UNIT):
        self.cap = to_rational(cap) if cap is not None else None
        self.ambient = ambient
        suffix = f"_C={format_rational(self.cap)}" if self.cap is not None else ""
        self.name = f"interval_sets{suffix}"

    def dist(self, a: IntervalSet, b: IntervalSet) -> Fraction:
        if self.cap is None:
            return metric_d(a, b)
        return metric_dC(a, b, self.cap)

    def join(self, a: IntervalSet, b: IntervalSet) -> IntervalSet:
        return union(a, b)

    def meet(self, a: IntervalSet, b: IntervalSet) -> IntervalSet:
        return intersect(a, b)

    def encode(self, a: IntervalSet) -> Any:
        return to_json_value(a)


class DualCarrier:
    """The order dual: join and meet trade places, and so do their hypotheses."""

    def __init__(self, base: MetrizedLatticeCarrier):
        self.base = base
        self.name = f"dual({base.name})"
        self.hypotheses = frozenset(_DUAL[h] for h in base.hypotheses)

    def dist(self, a, b) -> Fraction:
        return self.base.dist(a, b)

    def join(self, a, b):
        return self.base.meet(a, b)

    def meet(self, a, b):
        return self.base.join(a, b)

    def encode(self, a) -> Any:
        return self.base.encode(a)


class StepFunctionSpace:
    """Step functions under d'; a metric space only, no order."""

    name = "step_functions"
    hypotheses: FrozenSet[Hypothesis] = frozenset()

    def dist(self, a: StepFunction, b: StepFunction) -> Fraction:
        return d_prime(a, b)

    def encode(self, a: StepFunction) -> Any:
        return step_to_json_value(a)


def leq(carrier: MetrizedJoinCarrier, a, b) -> bool:
    """Derived order: a <= b iff a ∨ b = b."""
    return carrier.join(a, b) == b


def _fmt(q: Fraction) -> str:
    return format_rational(q)


def _violation(carrier: MetricCarrier, inputs: Sequence[Any], lhs: Fraction, rhs: Fraction, tag: str = "") -> Violation:
    encoded: List[Any] = [carrier.encode(x) for x in inputs]
    if tag:
        encoded.insert(0, tag)
    return Violation(inputs=encoded, lhs=_fmt(lhs), rhs=_fmt(rhs))


# -- checkers --------------------------------------------------------------


def check_metric_axioms(carrier: MetricCarrier, triples: Iterable[Tuple[Any, Any, Any]], name: str = "metric_axioms") -> CheckReport:
    """Nonnegativity, identity of indiscernibles, symmetry and the triangle inequality."""
    report = CheckReport(name=name)
    zero = Fraction(0)
    for x, y, z in triples:
        report.checked += 1
        dxy, dyx, dyz, dxz = carrier.dist(x, y), carrier.dist(y, x), carrier.dist(y, z), carrier.dist(x, z)
        if dxy < 0:
            report.violations.append(_violation(carrier, (x, y), dxy, zero, "nonnegativity"))
        if (dxy == 0) != (x == y):
            report.violations.append(_violation(carrier, (x, y), dxy, zero, "identity"))
        dxx = carrier.dist(x, x)
        if dxx != 0:
            report.violations.append(_violation(carrier, (x,), dxx, zero, "reflexivity"))
        if dxy != dyx:
            report.violations.append(_violation(carrier, (x, y), dxy, dyx, "symmetry"))
        if dxz > dxy + dyz:
            report.violations.append(_violation(carrier, (x, y, z), dxz, dxy + dyz, "triangle"))
    return report


def check_join_lipschitz(carrier: MetrizedJoinCarrier, samples: Iterable[Tuple[Any, Any, Any]]) -> CheckReport:
    report = CheckReport(name="join_lipschitz")
    for x, y, z in samples:
        report.checked += 1
        lhs = carrier.dist(carrier.join(x, y), carrier.join(x, z))
        rhs = carrier.dist(y, z)
        if lhs > rhs:
            report.violations.append(_violation(carrier, (x, y, z), lhs, rhs))
    return report


def check_meet_lipschitz(carrier: MetrizedLatticeCarrier, samples: Iterable[Tuple[Any, Any, Any]]) -> CheckReport:
    report = CheckReport(name="meet_lipschitz")
    for x, y, z in samples:
        report.checked += 1
        lhs = carrier.dist(carrier.meet(x, y), carrier.meet(x, z))
        rhs = carrier.dist(y, z)
        if lhs > rhs:
            report.violations.append(_violation(carrier, (x, y, z), lhs, rhs))
    return report


def check_weak_join(carrier: MetrizedJoinCarrier, samples: Iterable[Tuple[Any, Any]]) -> CheckReport:
    report = CheckReport(name="weak_join")
    for x, y in samples:
        report.checked += 1
        lhs = carrier.dist(x, carrier.join(x, y))
        rhs = carrier.dist(x, y)
        if lhs > rhs:
            report.violations.append(_violation(carrier, (x, y), lhs, rhs))
    return report


def check_weak_meet(carrier: MetrizedLatticeCarrier, samples: Iterable[Tuple[Any, Any]]) -> CheckReport:
    report = CheckReport(name="weak_meet")
    for x, y in samples:
        report.checked += 1
        lhs = carrier.dist(x, carrier.meet(x, y))
        rhs = carrier.dist(x, y)
        if lhs > rhs:
            report.violations.append(_violation(carrier, (x, y), lhs, rhs))
    return report


def check_chain_bound(carrier: MetrizedJoinCarrier, chain: Sequence[Any]) -> CheckReport:
    """d(x_0, x_0∨...∨x_i) <= sum of consecutive gaps, for every prefix."""
    report = CheckReport(name="chain_bound")
    if not chain:
        return report
    running = chain[0]
    gaps = Fraction(0)
    for i, x in enumerate(chain):
        if i:
            running = carrier.join(running, x)
            gaps += carrier.dist(chain[i - 1], x)
        report.checked += 1
        lhs = carrier.dist(chain[0], running)
        if lhs > gaps:
            report.violations.append(_violation(carrier, chain[: i + 1], lhs, gaps))
    return report


# -- certificates ----------------------------------------------------------


class GapCertificate(Generic[T]):
    """A sequence with proven bounds d(x_i, x_{i+1}) <= gap_bound(i).

    ``tail(h)`` must equal the sum of gap_bound(l) over l >= h in closed form.
    ``source_index(i)`` maps back to the index in the sequence this one was
    extracted from (identity when it was not extracted).
    """

    def __init__(
        self,
        carrier: MetricCarrier[T],
        term: Callable[[int], T],
        gap_bound: Callable[[int], Fraction],
        tail: Callable[[int], Fraction],
        source_index: Optional[Callable[[int], int]] = None,
        name: str = "",
    ):
        self.carrier = carrier
        self._term = term
        self.gap_bound = gap_bound
        self.tail = tail
        self.source_index = source_index or (lambda i: i)
        self.name = name
        self._cache: Dict[int, T] = {}

    def term(self, i: int) -> T:
        if i not in self._cache:
            self._cache[i] = self._term(i)
        return self._cache[i]

    @classmethod
    def geometric(
        cls,
        carrier: MetricCarrier[T],
        term: Callable[[int], T],
        first_gap: Fraction | int = 1,
        source_index: Optional[Callable[[int], int]] = None,
        name: str = "",
    ) -> "GapCertificate[T]":
        """gap_bound(i) = first_gap / 2^i, so tail(h) = 2·first_gap / 2^h."""
        first_gap = Fraction(first_gap)
        return cls(
            carrier,
            term,
            gap_bound=lambda i: first_gap / 2**i,
            tail=lambda h: 2 * first_gap / 2**h,
            source_index=source_index,
            name=name,
        )

    @classmethod
    def constant(cls, carrier: MetricCarrier[T], value: T, name: str = "constant") -> "GapCertificate[T]":
        return cls(carrier, lambda i: value, gap_bound=lambda i: Fraction(0), tail=lambda h: Fraction(0), name=name)

    def verify(self, horizon: int = DEFAULT_HORIZON) -> CheckReport:
        """Check every promised gap bound for i < horizon."""
        report = CheckReport(name=f"gap_bounds[{self.name}]")
        for i in range(horizon):
            report.checked += 1
            lhs = self.carrier.dist(self.term(i), self.term(i + 1))
            rhs = self.gap_bound(i)
            if lhs > rhs:
                report.violations.append(
                    Violation(inputs=[i, self.source_index(i)], lhs=_fmt(lhs), rhs=_fmt(rhs))
                )
        return report

    def __repr__(self) -> str:
        return f"GapCertificate({self.name or '?'}, carrier={self.carrier.name})"


def extract_fast_subsequence(
    carrier: MetricCarrier[T],
    seq: Callable[[int], T],
    cauchy_modulus: Callable[[Fraction], int],
    horizon: int = DEFAULT_HORIZON,
    name: str = "",
) -> GapCertificate[T]:
    """Pick indices n_i past the modulus of 2^-i so consecutive picks are within 2^-i.

    cauchy_modulus(eps) must return N with d(seq(m), seq(n)) <= eps for all
    m, n >= N. Every gap up to the horizon is checked; a breach raises.
    With the typewriter modulus (terms from row n on are within 2/n) pick i
    is the first term of row 2^(i+1), so its distance to the empty set is 2^-(i+1).
    """
    picks: List[int] = []

    def index(i: int) -> int:
        while len(picks) <= i:
            k = len(picks)
            candidate = cauchy_modulus(Fraction(1, 2**k))
            if picks:
                candidate = max(candidate, picks[-1] + 1)
            picks.append(candidate)
        return picks[i]

    cert = GapCertificate.geometric(
        carrier, lambda i: seq(index(i)), first_gap=1, source_index=index, name=name or "fast_subsequence"
    )
    report = cert.verify(horizon)
    if not report.passed:
        first = report.violations[0]
        raise ContractBreachError(
            f"Cauchy modulus broken at subsequence step {first.inputs[0]}: gap {first.lhs} > {first.rhs}"
        )
    logger.debug("Fast subsequence extracted | name=%s horizon=%d last_index=%d", cert.name, horizon, index(horizon))
    return cert


def check_sequence_follows_subsequence(
    cert: GapCertificate[T],
    seq: Callable[[int], T],
    limit: T,
    steps: int,
    bound: Optional[Callable[[int], Fraction]] = None,
) -> CheckReport:
    """Every seq(k) with source_index(i) <= k < source_index(i+1) lies within bound(i) of the limit.

    With picks past the modulus of 2^-i, seq(k) is within 2^-i of the pick
    and the pick within tail(i) of the limit, which is the default bound.
    """
    bound = bound or (lambda i: Fraction(1, 2**i) + cert.tail(i))
    carrier = cert.carrier
    report = CheckReport(name=f"whole_sequence[{cert.name}]")
    for i in range(steps):
        rhs = bound(i)
        for k in range(cert.source_index(i), cert.source_index(i + 1)):
            report.checked += 1
            lhs = carrier.dist(seq(k), limit)
            if lhs > rhs:
                report.violations.append(Violation(inputs=[i, k], lhs=_fmt(lhs), rhs=_fmt(rhs)))
    return report
