"""Finite subsets of a metric space under the diameter metric.

L is the upper semilattice of finite nonempty subsets of a metric space M,
joined by union and measured by

    d_L(S, T) = 0 if S = T, else diam(S ∪ T).

It satisfies the weak join inequality but not the Lipschitz one, and a
non-convergent Cauchy sequence of points of M gives one in L. L' adds ∅ as a
bottom element at distance 1 + d_L(P, S) from every S, for a fixed anchor P.

Point spaces are finite windows: rationals on the line, or a labelled
distance table. Accumulation points of the infinite space a window is cut
from are declared explicitly so isolation can be decided.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Any, Callable, FrozenSet, Iterable, Iterator, List, Optional, Protocol, Sequence, Tuple, Union

from app.errors import ChainError, WorkbenchError
from app.interval_sets import format_rational, to_rational
from app.logger import get_logger
from app.metrized_lattice import Hypothesis
from app.models import CheckReport, DiscontinuityRecord, Violation, Witness

logger = get_logger(__name__)

Point = Union[Fraction, str]


def _coerce_point(p: Any) -> Point:
    # strings are table labels; anything else is a rational coordinate
    return p if isinstance(p, str) else to_rational(p)


def encode_point(p: Point) -> str:
    return format_rational(p) if isinstance(p, Fraction) else p


# -- point spaces ----------------------------------------------------------


class MetricPointSpace(Protocol):
    name: str
    points: Tuple[Point, ...]

    def dist(self, p: Point, q: Point) -> Fraction: ...

    def is_limit_point(self, p: Point) -> bool: ...


@dataclass(frozen=True)
class RationalLine:
    """All of Q with |p - q|; every point is an accumulation point."""

    name: str = "Q"
    points: Tuple[Point, ...] = ()

    def dist(self, p: Point, q: Point) -> Fraction:
        return abs(p - q)

    def is_limit_point(self, p: Point) -> bool:
        return True


LINE = RationalLine()


@dataclass(frozen=True)
class PointSpace:
    """A finite set of rationals with |p - q|."""

    points: Tuple[Fraction, ...]
    limit_points: FrozenSet[Fraction] = frozenset()
    name: str = ""

    def __post_init__(self) -> None:
        pts = tuple(sorted(to_rational(p) for p in self.points))
        if len(set(pts)) != len(pts):
            raise WorkbenchError(f"point space has repeated points: {[format_rational(p) for p in pts]}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "limit_points", frozenset(to_rational(p) for p in self.limit_points))
        if not self.name:
            object.__setattr__(self, "name", "{" + ",".join(format_rational(p) for p in pts) + "}")

    def dist(self, p: Point, q: Point) -> Fraction:
        return abs(p - q)

    def is_limit_point(self, p: Point) -> bool:
        return p in self.limit_points


@dataclass(frozen=True)
class TablePointSpace:
    """Labelled points with an explicit distance table."""

    labels: Tuple[str, ...]
    table: Tuple[Tuple[Fraction, ...], ...]
    limit_points: FrozenSet[str] = frozenset()
    name: str = "table"

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        table = tuple(tuple(to_rational(v) for v in row) for row in self.table)
        n = len(labels)
        if len(set(labels)) != n:
            raise WorkbenchError(f"repeated labels in {labels}")
        if len(table) != n or any(len(row) != n for row in table):
            raise WorkbenchError(f"distance table must be {n}x{n}")
        for i, j in itertools.product(range(n), repeat=2):
            if table[i][j] != table[j][i]:
                raise WorkbenchError(f"distance table not symmetric at {labels[i]}, {labels[j]}")
            if (table[i][j] == 0) != (i == j) or table[i][j] < 0:
                raise WorkbenchError(f"distance table not a metric at {labels[i]}, {labels[j]}")
        for i, j, k in itertools.product(range(n), repeat=3):
            if table[i][k] > table[i][j] + table[j][k]:
                raise WorkbenchError(f"triangle inequality fails at {labels[i]}, {labels[j]}, {labels[k]}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "limit_points", frozenset(self.limit_points))

    @property
    def points(self) -> Tuple[str, ...]:
        return tuple(sorted(self.labels))

    def dist(self, p: Point, q: Point) -> Fraction:
        return self.table[self.labels.index(p)][self.labels.index(q)]

    def is_limit_point(self, p: Point) -> bool:
        return p in self.limit_points


def harmonic_space(n: int, include_zero: bool = False) -> PointSpace:
    """{1/k : 1 <= k <= n}, optionally with the accumulation point 0."""
    if n < 1:
        raise ValueError(f"harmonic space needs n >= 1, got {n}")
    pts = [Fraction(1, k) for k in range(1, n + 1)]
    if include_zero:
        pts.append(Fraction(0))
    name = f"harmonic({n}{', 0' if include_zero else ''})"
    return PointSpace(tuple(pts), frozenset({Fraction(0)}) if include_zero else frozenset(), name)


def load_point_space(value: Any) -> MetricPointSpace:
    """A JSON array of rationals, or {"labels": [...], "table": [[...]], "limit_points": [...]}."""
    if isinstance(value, str):
        value = json.loads(value)
    if isinstance(value, list):
        return PointSpace(tuple(to_rational(str(p)) for p in value))
    if isinstance(value, dict) and "table" in value:
        return TablePointSpace(
            tuple(value["labels"]),
            tuple(tuple(to_rational(str(v)) for v in row) for row in value["table"]),
            frozenset(value.get("limit_points", ())),
            value.get("name", "table"),
        )
    raise WorkbenchError(f"cannot read a point space from {value!r}")


# -- elements of L and L' --------------------------------------------------


@dataclass(frozen=True, order=True)
class FiniteSubset:
    elems: Tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.elems:
            raise WorkbenchError("elements of L are nonempty; use EMPTY_SUBSET for L'")
        if list(self.elems) != sorted(set(self.elems)):
            raise WorkbenchError(f"subset points must be sorted and distinct, got {self.elems}")

    @classmethod
    def of(cls, points: Iterable[Any]) -> "FiniteSubset":
        return cls(tuple(sorted({_coerce_point(p) for p in points})))

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.elems)

    def __repr__(self) -> str:
        return "{" + ",".join(encode_point(p) for p in self.elems) + "}"


class EmptySubset:
    _instance: Optional["EmptySubset"] = None

    def __new__(cls) -> "EmptySubset":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __len__(self) -> int:
        return 0

    def __repr__(self) -> str:
        return "∅"


EMPTY_SUBSET = EmptySubset()

LPrimeElement = Union[FiniteSubset, EmptySubset]


def subset(*points: Any) -> FiniteSubset:
    return FiniteSubset.of(points)


def encode_subset(s: LPrimeElement) -> List[str]:
    return [] if s is EMPTY_SUBSET else [encode_point(p) for p in s]


class Isolation(enum.Enum):
    NOT_ISOLATED = "not_isolated"


NOT_ISOLATED = Isolation.NOT_ISOLATED


# -- metrics ---------------------------------------------------------------


@lru_cache(maxsize=65536)
def _diam(space: MetricPointSpace, elems: Tuple[Point, ...]) -> Fraction:
    return max((space.dist(p, q) for p, q in itertools.combinations(elems, 2)), default=Fraction(0))


def diam(s: FiniteSubset, space: MetricPointSpace = LINE) -> Fraction:
    """Largest pairwise distance; 0 for singletons."""
    return _diam(space, s.elems)


def join(s: FiniteSubset, t: FiniteSubset) -> FiniteSubset:
    return FiniteSubset(tuple(sorted(set(s.elems) | set(t.elems))))


def dL(s: FiniteSubset, t: FiniteSubset, space: MetricPointSpace = LINE) -> Fraction:
    if s == t:
        return Fraction(0)
    return diam(join(s, t), space)


def default_anchor(space: MetricPointSpace) -> FiniteSubset:
    if not space.points:
        raise WorkbenchError(f"space {space.name} has no listed points; pass an anchor")
    return FiniteSubset((space.points[0],))


def dLprime(a: LPrimeElement, b: LPrimeElement, anchor: FiniteSubset, space: MetricPointSpace = LINE) -> Fraction:
    """d_L on nonempty pairs; 1 + d_L(P, S) between ∅ and S."""
    if a is EMPTY_SUBSET and b is EMPTY_SUBSET:
        return Fraction(0)
    if a is EMPTY_SUBSET:
        return 1 + dL(anchor, b, space)
    if b is EMPTY_SUBSET:
        return 1 + dL(anchor, a, space)
    return dL(a, b, space)


class DiameterCarrier:
    """L as a metrized upper semilattice; registered with the weak join inequality only."""

    hypotheses = frozenset({Hypothesis.WEAK_JOIN})

    def __init__(self, space: MetricPointSpace = LINE):
        self.space = space
        self.name = f"L({space.name})"

    def dist(self, a: FiniteSubset, b: FiniteSubset) -> Fraction:
        return dL(a, b, self.space)

    def join(self, a: FiniteSubset, b: FiniteSubset) -> FiniteSubset:
        return join(a, b)

    def encode(self, a: FiniteSubset) -> List[str]:
        return encode_subset(a)


class LPrimeCarrier:
    """L' = L ∪ {∅} with intersection as meet (∅ when disjoint)."""

    hypotheses = frozenset({Hypothesis.WEAK_JOIN})

    def __init__(self, space: MetricPointSpace, anchor: Optional[FiniteSubset] = None):
        self.space = space
        self.anchor = anchor or default_anchor(space)
        self.name = f"L'({space.name}, P={self.anchor!r})"

    def dist(self, a: LPrimeElement, b: LPrimeElement) -> Fraction:
        return dLprime(a, b, self.anchor, self.space)

    def join(self, a: LPrimeElement, b: LPrimeElement) -> LPrimeElement:
        if a is EMPTY_SUBSET:
            return b
        if b is EMPTY_SUBSET:
            return a
        return join(a, b)

    def meet(self, a: LPrimeElement, b: LPrimeElement) -> LPrimeElement:
        if a is EMPTY_SUBSET or b is EMPTY_SUBSET:
            return EMPTY_SUBSET
        common = set(a.elems) & set(b.elems)
        return FiniteSubset(tuple(sorted(common))) if common else EMPTY_SUBSET

    def encode(self, a: LPrimeElement) -> List[str]:
        return encode_subset(a)


# -- searches and witnesses ------------------------------------------------


def subsets(space: MetricPointSpace, size_cap: int) -> List[FiniteSubset]:
    """Nonempty subsets of at most size_cap points, by size and then lexicographically."""
    if size_cap < 1:
        raise ValueError(f"size cap must be >= 1, got {size_cap}")
    return [
        FiniteSubset(combo)
        for size in range(1, min(size_cap, len(space.points)) + 1)
        for combo in itertools.combinations(space.points, size)
    ]


def lprime_elements(space: MetricPointSpace, size_cap: int) -> List[LPrimeElement]:
    return [EMPTY_SUBSET, *subsets(space, size_cap)]


def find_dv_violation(space: MetricPointSpace, size_cap: int) -> Optional[Witness]:
    """First (x, y, z) with d_L(x∨y, x∨z) > d_L(y, z), or None."""
    family = subsets(space, size_cap)
    for x, y, z in itertools.product(family, repeat=3):
        lhs = dL(join(x, y), join(x, z), space)
        rhs = dL(y, z, space)
        if lhs > rhs:
            logger.debug("dv witness | space=%s x=%r y=%r z=%r", space.name, x, y, z)
            return Witness(
                x=encode_subset(x),
                y=encode_subset(y),
                z=encode_subset(z),
                lhs=format_rational(lhs),
                rhs=format_rational(rhs),
            )
    return None


def check_increasing_gap(chain: Sequence[FiniteSubset], space: MetricPointSpace = LINE) -> CheckReport:
    """Consecutive distances along a strictly increasing chain never drop below diam(chain[1])."""
    if len(chain) < 2:
        raise ChainError(f"chain needs at least two sets, got {len(chain)}")
    for s, t in zip(chain, chain[1:]):
        if not set(s.elems) < set(t.elems):
            raise ChainError(f"{s!r} is not a proper subset of {t!r}")
    report = CheckReport(name="increasing_gap")
    bound = diam(chain[1], space)
    for s, t in zip(chain, chain[1:]):
        report.checked += 1
        gap = dL(s, t, space)
        if gap < bound:
            report.violations.append(
                Violation(inputs=[encode_subset(s), encode_subset(t)], lhs=format_rational(gap), rhs=format_rational(bound))
            )
    return report


def isolation_radius(
    s: LPrimeElement, space: MetricPointSpace, anchor: Optional[FiniteSubset] = None
) -> Union[Fraction, Isolation]:
    """Radius of a ball around s in L' holding no other element, or NOT_ISOLATED.

    For a non-singleton this is min(diam(S), 1 + d_L(P, S)); ∅ gets 1. A
    singleton {x} is not isolated when x is an accumulation point of the space;
    otherwise its radius is the distance to the nearest other point, capped by
    the distance to ∅.
    """
    anchor = anchor or default_anchor(space)
    if s is EMPTY_SUBSET:
        return Fraction(1)
    to_empty = 1 + dL(anchor, s, space)
    if len(s) >= 2:
        return min(diam(s, space), to_empty)
    (x,) = s.elems
    if space.is_limit_point(x):
        return NOT_ISOLATED
    others = [space.dist(x, q) for q in space.points if q != x]
    return min([to_empty, *others])


def harmonic_point(i: int) -> Fraction:
    """The i-th point 1/(i+1) of the harmonic sequence."""
    return Fraction(1, i + 1)


def harmonic_modulus(eps: Fraction) -> int:
    """N with |1/m - 1/n| <= eps for all m, n >= N."""
    return max(1, ceil(1 / eps))


def nonconvergence_check(
    candidates: Iterable[FiniteSubset],
    terms: int = 64,
    seq: Callable[[int], Fraction] = harmonic_point,
    limit: Fraction = Fraction(0),
    modulus: Callable[[Fraction], int] = harmonic_modulus,
    window: int = 8,
) -> CheckReport:
    """The singletons {seq(i)} are Cauchy in L but no candidate is their limit.

    ``limit`` is where seq converges on the line; it must not be a point of
    the lattice. Checks the Cauchy modulus on the first ``terms`` indices.
    Every candidate with two or more points stays diam(S) away from every
    term. A singleton {x} sits at gap = |x - limit| from the limit, and from
    index modulus(gap/2) on every term is within gap/2 of the limit, so the
    ``window`` terms from there must all stay at least gap/2 from {x}.
    """
    report = CheckReport(name="nonconvergence")
    points = [seq(i) for i in range(terms)]
    for n0 in range(1, terms + 1):
        bound = Fraction(1, n0)
        for m, n in itertools.combinations(range(n0 - 1, terms), 2):
            report.checked += 1
            lhs = dL(FiniteSubset((points[m],)), FiniteSubset((points[n],)))
            if lhs > bound:
                report.violations.append(Violation(inputs=["cauchy", m, n], lhs=format_rational(lhs), rhs=format_rational(bound)))

    for cand in candidates:
        if len(cand) >= 2:
            bound = diam(cand)
            if bound <= 0:
                report.violations.append(Violation(inputs=["diameter", encode_subset(cand)], lhs="0", rhs="0"))
            for p in points:
                report.checked += 1
                lhs = dL(cand, FiniteSubset((p,)))
                if lhs < bound:
                    report.violations.append(
                        Violation(inputs=["pair_candidate", encode_subset(cand), encode_point(p)], lhs=format_rational(lhs), rhs=format_rational(bound))
                    )
            continue
        (x,) = cand.elems
        gap = abs(x - limit)
        if gap == 0:
            report.violations.append(Violation(inputs=["limit_candidate", encode_subset(cand)], lhs="0", rhs="0"))
            continue
        half = gap / 2
        start = modulus(half)
        for i in range(start, start + max(1, window)):
            p = seq(i)
            report.checked += 1
            lhs = dL(cand, FiniteSubset((p,)))
            if abs(p - limit) > half or lhs < half:
                report.violations.append(
                    Violation(inputs=["singleton_candidate", encode_subset(cand), i], lhs=format_rational(lhs), rhs=format_rational(half))
                )
    return report


def join_discontinuity_witness(
    xs: Sequence[Point], y: Point, z: Point, space: MetricPointSpace = LINE
) -> DiscontinuityRecord:
    """{x_i} -> {y} while {x_i, z} stays at least d(y, z) from {y, z}."""
    if y == z:
        raise WorkbenchError("the fixed point z must differ from the limit y")
    gap = space.dist(y, z)
    report = CheckReport(name="join_discontinuity")
    singles: List[Fraction] = []
    pairs: List[Fraction] = []
    target = FiniteSubset.of([y, z])
    for i, x in enumerate(xs):
        singles.append(dL(FiniteSubset((x,)), FiniteSubset((y,)), space))
        pair = dL(FiniteSubset.of([x, z]), target, space)
        pairs.append(pair)
        if x == y:
            continue
        report.checked += 1
        if pair < gap:
            report.violations.append(Violation(inputs=[i, encode_point(x)], lhs=format_rational(pair), rhs=format_rational(gap)))
    moving = [i for i, x in enumerate(xs) if x != y]
    discontinuous = bool(moving) and bool(singles) and singles[-1] < gap and all(pairs[i] >= gap for i in moving)
    return DiscontinuityRecord(
        singleton_distances=[format_rational(d) for d in singles],
        pair_distances=[format_rational(d) for d in pairs],
        gap=format_rational(gap),
        discontinuous=discontinuous,
        report=report,
    )


def check_singleton_isometry(space: MetricPointSpace) -> CheckReport:
    """d_L({x}, {y}) = d_M(x, y) for all pairs of listed points."""
    report = CheckReport(name="singleton_isometry")
    for p, q in itertools.product(space.points, repeat=2):
        report.checked += 1
        lhs = dL(FiniteSubset((p,)), FiniteSubset((q,)), space)
        rhs = space.dist(p, q)
        if lhs != rhs:
            report.violations.append(Violation(inputs=[encode_point(p), encode_point(q)], lhs=format_rational(lhs), rhs=format_rational(rhs)))
    return report


@dataclass
class WeakMeetSplit:
    intersecting: CheckReport
    disjoint: CheckReport = field(default_factory=lambda: CheckReport(name="weak_meet_disjoint"))


def split_weak_meet_by_overlap(carrier: LPrimeCarrier, size_cap: int) -> WeakMeetSplit:
    """Weak meet d(S, S∧T) <= d(S, T) over all nonempty pairs, split by whether S∩T is empty."""
    split = WeakMeetSplit(intersecting=CheckReport(name="weak_meet_intersecting"))
    family = subsets(carrier.space, size_cap)
    for s, t in itertools.product(family, repeat=2):
        m = carrier.meet(s, t)
        bucket = split.disjoint if m is EMPTY_SUBSET else split.intersecting
        bucket.checked += 1
        lhs = carrier.dist(s, m)
        rhs = carrier.dist(s, t)
        if lhs > rhs:
            bucket.violations.append(
                Violation(inputs=[encode_subset(s), encode_subset(t)], lhs=format_rational(lhs), rhs=format_rational(rhs))
            )
    return split
