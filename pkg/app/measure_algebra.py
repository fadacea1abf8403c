"""The Boolean ring B of measurable subsets of [0,1) modulo null sets.

Elements are IntervalSets confined to [0,1). Besides the ring operations this
module carries the two typewriter sequences (Cauchy in measure, yet every
point is covered infinitely often) and the bisection procedure showing that a
prime ideal has elements arbitrarily close to 1.

A prime ideal of B cannot be written down, so the bisection takes a
ChooserOracle that decides which half stays in the ideal. Every measured claim
of the procedure holds for every oracle.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterator, Optional, Protocol, Tuple

from app.errors import AmbientError, NullSetError
from app.interval_sets import (
    EMPTY,
    IntervalSet,
    RationalLike,
    find_halving_point,
    intersect,
    interval,
    measure,
    metric_d,
    split_at,
    symdiff,
    to_rational,
)
from app.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BElement:
    set: IntervalSet = EMPTY

    def __post_init__(self) -> None:
        if not self.set.is_within(Fraction(1)):
            raise AmbientError(f"{self.set!r} is not inside [0,1)")

    def __repr__(self) -> str:
        return f"B{self.set!r}"


ZERO = BElement(EMPTY)
ONE = BElement(interval(0, 1))


def element(s: IntervalSet) -> BElement:
    return s if isinstance(s, BElement) else BElement(s)


def ring_add(a: BElement, b: BElement) -> BElement:
    return BElement(symdiff(element(a).set, element(b).set))


def ring_mul(a: BElement, b: BElement) -> BElement:
    return BElement(intersect(element(a).set, element(b).set))


def distance(a: BElement, b: BElement) -> Fraction:
    return metric_d(element(a).set, element(b).set)


# -- typewriter sequences --------------------------------------------------


def typewriter_row(k: int) -> Tuple[int, int]:
    """Decode k = 1+2+...+(n-1)+i with 1 <= i <= n into (n, i)."""
    if k < 1:
        raise ValueError(f"typewriter index starts at 1, got {k}")
    n = (isqrt(8 * k + 1) - 1) // 2
    if n * (n + 1) // 2 < k:
        n += 1
    return n, k - n * (n - 1) // 2


def row_start(n: int) -> int:
    """Index of the first term of row n."""
    return n * (n - 1) // 2 + 1


def typewriter(k: int) -> BElement:
    n, i = typewriter_row(k)
    return BElement(interval(Fraction(i - 1, n), Fraction(i, n)))


def stretched_term_index(k: int) -> int:
    """Which typewriter term sits at position k once term m is repeated 2^m times."""
    if k < 1:
        raise ValueError(f"typewriter index starts at 1, got {k}")
    # term m occupies positions 2^m - 1 .. 2^(m+1) - 2
    return (k + 1).bit_length() - 1


def stretched_typewriter(k: int) -> BElement:
    return typewriter(stretched_term_index(k))


def typewriter_modulus(eps: RationalLike) -> int:
    """First index N with d(typewriter(m), typewriter(n)) <= eps for all m, n >= N.

    Two terms from rows at or past n are at most 2/n apart, so row ceil(2/eps)
    is far enough.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    n = max(1, -((-2 * eps.denominator) // eps.numerator))
    return row_start(n)


def membership_count(t: RationalLike, rows: int) -> int:
    """How many typewriter terms in rows 1..rows contain t."""
    t = to_rational(t)
    count = 0
    for n in range(1, rows + 1):
        for i in range(1, n + 1):
            if typewriter(row_start(n) + i - 1).set.contains(t):
                count += 1
    return count


# -- prime-ideal bisection -------------------------------------------------


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class ChooserOracle(Protocol):
    def choose(self, left: IntervalSet, right: IntervalSet) -> Side: ...


class AlwaysLeft:
    def choose(self, left: IntervalSet, right: IntervalSet) -> Side:
        return Side.LEFT


class AlwaysRight:
    def choose(self, left: IntervalSet, right: IntervalSet) -> Side:
        return Side.RIGHT


class SeededOracle:
    """Coin-flip chooser; deterministic for a given seed. Not thread-safe."""

    def __init__(self, seed: int | str):
        self.seed = seed
        self._rng = random.Random(seed)

    def choose(self, left: IntervalSet, right: IntervalSet) -> Side:
        return Side.LEFT if self._rng.random() < 0.5 else Side.RIGHT

    def __repr__(self) -> str:
        return f"SeededOracle(seed={self.seed!r})"


def halve(u: IntervalSet) -> Tuple[IntervalSet, IntervalSet]:
    """Split U at its halving point into two disjoint halves of equal measure."""
    if measure(u) == 0:
        raise NullSetError("bisection needs a set of positive measure")
    return split_at(u, find_halving_point(u))


def prime_bisection_step(u: IntervalSet, oracle: ChooserOracle) -> IntervalSet:
    """One step: [1+U] in P gives [1+S] in P for one half S of U."""
    left, right = halve(u)
    side = oracle.choose(left, right)
    return left if side is Side.LEFT else right


def bisection_ladder(
    u0: IntervalSet, oracle: ChooserOracle, n: int
) -> Iterator[Tuple[int, IntervalSet, Fraction]]:
    """Yield (step, U_step, d(1 + U_step, 1)) for step = 0..n."""
    if measure(u0) == 0:
        raise NullSetError("bisection needs a set of positive measure")
    u = element(u0).set
    for step in range(n + 1):
        if step:
            u = prime_bisection_step(u, oracle)
        yield step, u, distance(ring_add(ONE, BElement(u)), ONE)


def approach_one(u0: IntervalSet, oracle: ChooserOracle, n: int) -> Tuple[IntervalSet, Fraction]:
    """Iterate the bisection n times; the distance of 1+U_n from 1 is measure(U0)/2^n."""
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    last: Optional[Tuple[int, IntervalSet, Fraction]] = None
    for last in bisection_ladder(u0, oracle, n):
        pass
    assert last is not None
    _, u, dist = last
    logger.debug("approach_one done | steps=%d distance=%s", n, dist)
    return u, dist


def approach_element(v: BElement, one_minus_u: BElement) -> Tuple[BElement, Fraction]:
    """Multiply V by an ideal element 1+U; the product lies within measure(V ∩ U) of V."""
    product = ring_mul(v, one_minus_u)
    return product, distance(product, v)


def closure_witness(
    v: BElement, u0: IntervalSet, oracle: ChooserOracle, n: int
) -> Tuple[BElement, Fraction, Fraction]:
    """Element of the ideal near V after n bisection steps.

    Returns (V·(1+U_n), d(V·(1+U_n), V), measure(U_n)); the distance never
    exceeds the last value.
    """
    u_n, bound = approach_one(u0, oracle, n)
    near, dist = approach_element(v, ring_add(ONE, BElement(u_n)))
    return near, dist, bound
