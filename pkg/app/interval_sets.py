"""Finite unions of half-open rational intervals.

An IntervalSet is kept in canonical form: intervals sorted by ``lo``, pairwise
separated by a positive gap (adjacent pieces are merged). Two canonical sets
are equal exactly when they differ by a null set, so the same type serves for
measurable sets and for their classes modulo null sets.

All endpoints and measures are ``fractions.Fraction``.
"""

from __future__ import annotations

import json
import operator
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from app.errors import AmbientError, MalformedIntervalError, NullSetError

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise MalformedIntervalError(f"refusing inexact endpoint {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise MalformedIntervalError(f"cannot parse rational {value!r}") from exc


def format_rational(q: Fraction) -> str:
    """``"p/q"``, or ``"p"`` when the denominator is 1."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return to_rational(text.strip())


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo < 0:
            raise MalformedIntervalError(f"interval starts below 0: [{self.lo}, {self.hi})")
        if self.lo >= self.hi:
            raise MalformedIntervalError(f"empty or reversed interval [{self.lo}, {self.hi})")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self) -> str:
        return f"[{format_rational(self.lo)},{format_rational(self.hi)})"


def _lo(iv: Interval) -> Fraction:
    return iv.lo


IntervalLike = Union[Interval, Tuple[RationalLike, RationalLike], Sequence[RationalLike]]


@dataclass(frozen=True)
class IntervalSet:
    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        ivs = self.intervals
        for prev, cur in zip(ivs, ivs[1:]):
            if not prev.hi < cur.lo:
                raise MalformedIntervalError(
                    f"IntervalSet not canonical at {prev!r}, {cur!r}; build it with normalize()"
                )

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __repr__(self) -> str:
        if not self.intervals:
            return "IntervalSet(∅)"
        return "IntervalSet(" + "∪".join(repr(iv) for iv in self.intervals) + ")"

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return union(self, other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        return symdiff(self, other)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return difference(self, other)

    def contains(self, t: RationalLike) -> bool:
        t = to_rational(t)
        idx = bisect_right(self.intervals, t, key=_lo) - 1
        return idx >= 0 and t < self.intervals[idx].hi

    @property
    def sup(self) -> Fraction:
        """Right end of the last interval (0 for the empty set)."""
        return self.intervals[-1].hi if self.intervals else Fraction(0)

    def is_within(self, hi: Fraction) -> bool:
        return self.sup <= hi


EMPTY = IntervalSet()


@dataclass(frozen=True)
class Ambient:
    """Either [0, hi) or the unbounded half-line (hi is None)."""

    hi: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.hi is not None:
            object.__setattr__(self, "hi", to_rational(self.hi))
            if self.hi <= 0:
                raise AmbientError(f"bounded ambient needs hi > 0, got {self.hi}")

    @property
    def bounded(self) -> bool:
        return self.hi is not None

    def top(self) -> IntervalSet:
        if self.hi is None:
            raise AmbientError("unbounded ambient has no unit element")
        return IntervalSet((Interval(Fraction(0), self.hi),))


UNIT = Ambient(Fraction(1))
UNBOUNDED = Ambient(None)


def _coerce(raw: IntervalLike) -> Interval:
    if isinstance(raw, Interval):
        return raw
    try:
        lo, hi = raw
    except (TypeError, ValueError) as exc:
        raise MalformedIntervalError(f"expected a (lo, hi) pair, got {raw!r}") from exc
    return Interval(to_rational(lo), to_rational(hi))


def normalize(raw: Iterable[IntervalLike]) -> IntervalSet:
    """Sort, merge overlapping and adjacent intervals, return the canonical set."""
    items = sorted(_coerce(r) for r in raw)
    merged: List[Interval] = []
    for iv in items:
        if merged and iv.lo <= merged[-1].hi:
            last = merged[-1]
            if iv.hi > last.hi:
                merged[-1] = Interval(last.lo, iv.hi)
        else:
            merged.append(iv)
    return IntervalSet(tuple(merged))


def interval(lo: RationalLike, hi: RationalLike) -> IntervalSet:
    """The one-piece set [lo, hi)."""
    return IntervalSet((Interval(to_rational(lo), to_rational(hi)),))


def from_pairs(pairs: Iterable[IntervalLike]) -> IntervalSet:
    return normalize(pairs)


def _boundaries(a: IntervalSet) -> List[Fraction]:
    return [p for iv in a.intervals for p in (iv.lo, iv.hi)]


def _segments(a: IntervalSet, b: IntervalSet, keep: Callable[[bool, bool], bool]) -> Iterator[Tuple[Fraction, Fraction]]:
    """Maximal [lo, hi) where keep(t in a, t in b) holds, left to right.

    Both boundary lists are strictly increasing, so one merged pass over them
    visits every point where membership can change.
    """
    ea, eb = _boundaries(a), _boundaries(b)
    na, nb = len(ea), len(eb)
    i = j = 0
    in_a = in_b = False
    start: Optional[Fraction] = None
    while i < na or j < nb:
        t = ea[i] if j >= nb or (i < na and ea[i] <= eb[j]) else eb[j]
        if i < na and ea[i] == t:
            in_a = not in_a
            i += 1
        if j < nb and eb[j] == t:
            in_b = not in_b
            j += 1
        if keep(in_a, in_b):
            if start is None:
                start = t
        elif start is not None:
            yield start, t
            start = None


def _combine(a: IntervalSet, b: IntervalSet, keep: Callable[[bool, bool], bool]) -> IntervalSet:
    return IntervalSet(tuple(Interval(lo, hi) for lo, hi in _segments(a, b, keep)))


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if not a:
        return b
    if not b:
        return a
    return _combine(a, b, operator.or_)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if not a or not b:
        return EMPTY
    return _combine(a, b, operator.and_)


def symdiff(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """S + T in the Boolean ring: points in exactly one of the two sets."""
    return _combine(a, b, operator.ne)


def _minus(x: bool, y: bool) -> bool:
    return x and not y


def difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return _combine(a, b, _minus)


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    return normalize(iv for s in sets for iv in s.intervals)


def complement(a: IntervalSet, within: Ambient = UNIT) -> IntervalSet:
    """1 + A inside a bounded ambient [0, hi)."""
    if not within.bounded:
        raise AmbientError("complement needs a bounded ambient; finite-measure sets form a nonunital ring")
    if not a.is_within(within.hi):
        raise AmbientError(f"{a!r} does not lie inside [0, {within.hi})")
    return symdiff(a, within.top())


def measure(a: IntervalSet) -> Fraction:
    return sum((iv.length for iv in a.intervals), Fraction(0))


def metric_d(a: IntervalSet, b: IntervalSet) -> Fraction:
    """d(A, B) = measure(A + B)."""
    return sum((hi - lo for lo, hi in _segments(a, b, operator.ne)), Fraction(0))


def metric_dC(a: IntervalSet, b: IntervalSet, cap: RationalLike) -> Fraction:
    """The capped metric min(measure(A + B), C), a metric for sets of any finite measure."""
    cap = to_rational(cap)
    if cap <= 0:
        raise ValueError(f"cap C must be positive, got {cap}")
    return min(metric_d(a, b), cap)


def split_at(a: IntervalSet, t: RationalLike) -> Tuple[IntervalSet, IntervalSet]:
    """(A ∩ [0,t), A ∩ [t,∞))."""
    t = to_rational(t)
    if t < 0:
        raise ValueError(f"split point must be >= 0, got {t}")
    left: List[Interval] = []
    right: List[Interval] = []
    for iv in a.intervals:
        if iv.hi <= t:
            left.append(iv)
        elif iv.lo >= t:
            right.append(iv)
        else:
            left.append(Interval(iv.lo, t))
            right.append(Interval(t, iv.hi))
    return IntervalSet(tuple(left)), IntervalSet(tuple(right))


def find_halving_point(a: IntervalSet) -> Fraction:
    """Smallest t with measure(A ∩ [0,t)) = measure(A)/2."""
    total = measure(a)
    if total == 0:
        raise NullSetError("cannot halve a null set")
    target = total / 2
    acc = Fraction(0)
    for iv in a.intervals:
        if acc + iv.length >= target:
            return iv.lo + (target - acc)
        acc += iv.length
    raise AssertionError("cumulative length never reached half the measure")  # unreachable


# JSON codec: [[lo, hi], ...] with "p/q" strings

def to_json_value(a: IntervalSet) -> List[List[str]]:
    return [[format_rational(iv.lo), format_rational(iv.hi)] for iv in a.intervals]


def from_json_value(value: Sequence[Sequence[str]]) -> IntervalSet:
    return normalize((parse_rational(str(lo)), parse_rational(str(hi))) for lo, hi in value)


def dumps(a: IntervalSet) -> str:
    return json.dumps(to_json_value(a), separators=(",", ":"))


def loads(text: str) -> IntervalSet:
    return from_json_value(json.loads(text))
