"""Seeded generators for random interval sets, step functions and partitions.

Everything lives on the grid of multiples of 1/denominator so sampled values
stay small exact rationals. Generators take a ``random.Random`` and never touch
the global one.
"""

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from app.algebra_star import Label, StepFunction
from app.interval_sets import EMPTY, IntervalSet, normalize

DEFAULT_DENOMINATOR = 24


def interval_set(rng: random.Random, max_pieces: int = 3, denominator: int = DEFAULT_DENOMINATOR, hi: int = 1) -> IntervalSet:
    """Up to max_pieces random intervals inside [0, hi); empty about one time in eight."""
    if rng.random() < 0.125:
        return EMPTY
    top = denominator * hi
    pieces = []
    for _ in range(rng.randint(1, max_pieces)):
        a, b = sorted(rng.sample(range(top + 1), 2))
        pieces.append((Fraction(a, denominator), Fraction(b, denominator)))
    return normalize(pieces)


def interval_set_tuple(rng: random.Random, arity: int, **kwargs) -> Tuple[IntervalSet, ...]:
    return tuple(interval_set(rng, **kwargs) for _ in range(arity))


def step_function(rng: random.Random, labels: Sequence[Label], denominator: int = 8) -> StepFunction:
    """Each grid cell [k/den, (k+1)/den) gets a random label."""
    cells: dict = {}
    for k in range(denominator):
        label = rng.choice(list(labels))
        cells.setdefault(label, []).append((Fraction(k, denominator), Fraction(k + 1, denominator)))
    return StepFunction.from_mapping({label: normalize(pieces) for label, pieces in cells.items()})


def _cells(denominator: int, owners: Sequence[int], size: int) -> List[IntervalSet]:
    pieces: List[List[Tuple[Fraction, Fraction]]] = [[] for _ in range(size)]
    for k, owner in enumerate(owners):
        if owner >= 0:
            pieces[owner].append((Fraction(k, denominator), Fraction(k + 1, denominator)))
    return [normalize(p) for p in pieces]


def partition_candidate(rng: random.Random, size: int = 4, denominator: int = 12) -> List[IntervalSet]:
    """Disjoint sets of total measure 1: every grid cell goes to one of them."""
    return _cells(denominator, [rng.randrange(size) for _ in range(denominator)], size)


def deficient_candidate(rng: random.Random, size: int = 4, denominator: int = 12) -> List[IntervalSet]:
    """Disjoint sets missing at least one grid cell, so their measures sum below 1."""
    owners = [rng.randrange(-1, size) for _ in range(denominator)]
    owners[rng.randrange(denominator)] = -1
    return _cells(denominator, owners, size)


def overlapping_candidate(rng: random.Random, size: int = 4, denominator: int = 12) -> List[IntervalSet]:
    """Arbitrary sets inside [0,1), overlapping or not."""
    return [interval_set(rng, denominator=denominator) for _ in range(size)]
