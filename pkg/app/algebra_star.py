"""Step functions on [0,1) valued in a finite algebra.

A StepFunction is a finite partition of [0,1) into IntervalSets, each part
carrying a distinct label. Operations of the value algebra are lifted
pointwise through the common refinement of the arguments; the lifted
operations are 1-Lipschitz in each argument for the metric

    d'(f, g) = measure{t : f(t) != g(t)} = (sum_x d(f_x, g_x)) / 2.

With a ring as value algebra the characteristic functions of sets are central
idempotents, which drives the ring version of the bisection argument.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from app.errors import (
    AlgebraError,
    AmbientError,
    ArityMismatchError,
    ContractBreachError,
    NullSetError,
    PartitionError,
    StepFunctionError,
)
from app.interval_sets import (
    EMPTY,
    UNIT,
    IntervalSet,
    complement,
    difference,
    format_rational,
    from_json_value,
    intersect,
    measure,
    metric_d,
    to_json_value,
    union_all,
)
from app.logger import get_logger
from app.measure_algebra import ChooserOracle, Side, halve

logger = get_logger(__name__)

Label = str
UNIT_SET = UNIT.top()


# -- finite algebras -------------------------------------------------------


class OperationTable(BaseModel):
    arity: int = Field(ge=0)
    # nested lists indexed by carrier position, one nesting level per argument
    table: Any


class AlgebraDescription(BaseModel):
    carrier: List[Label]
    ops: Dict[str, OperationTable]


class FiniteAlgebra:
    """A finite carrier with finitely many total, table-driven operations."""

    def __init__(self, carrier: Sequence[Label], ops: Mapping[str, OperationTable], name: str = ""):
        self.carrier: Tuple[Label, ...] = tuple(str(x) for x in carrier)
        if len(set(self.carrier)) != len(self.carrier):
            raise AlgebraError("carrier labels must be distinct")
        if not self.carrier:
            raise AlgebraError("carrier must be nonempty")
        self.name = name
        self._members = frozenset(self.carrier)
        self._arity: Dict[str, int] = {}
        self._tables: Dict[str, Dict[Tuple[Label, ...], Label]] = {}
        for op_name, entry in ops.items():
            self._arity[op_name] = entry.arity
            self._tables[op_name] = self._flatten(op_name, entry)

    def _flatten(self, op_name: str, entry: OperationTable) -> Dict[Tuple[Label, ...], Label]:
        flat: Dict[Tuple[Label, ...], Label] = {}
        for args in itertools.product(range(len(self.carrier)), repeat=entry.arity):
            cell: Any = entry.table
            try:
                for position in args:
                    cell = cell[position]
            except (IndexError, TypeError, KeyError) as exc:
                raise AlgebraError(f"operation '{op_name}' is not total: missing entry {args}") from exc
            value = str(cell)
            if value not in self._members:
                raise AlgebraError(f"operation '{op_name}' leaves the carrier: {value!r}")
            flat[tuple(self.carrier[p] for p in args)] = value
        return flat

    @classmethod
    def from_description(cls, description: AlgebraDescription | Mapping[str, Any], name: str = "") -> "FiniteAlgebra":
        if not isinstance(description, AlgebraDescription):
            description = AlgebraDescription.model_validate(description)
        return cls(description.carrier, description.ops, name=name)

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "FiniteAlgebra":
        return cls.from_description(AlgebraDescription.model_validate_json(text), name=name)

    def arity(self, op_name: str) -> int:
        try:
            return self._arity[op_name]
        except KeyError:
            raise AlgebraError(f"unknown operation '{op_name}'") from None

    @property
    def operations(self) -> Tuple[str, ...]:
        return tuple(self._arity)

    def apply(self, op_name: str, *args: Label) -> Label:
        expected = self.arity(op_name)
        if len(args) != expected:
            raise ArityMismatchError(op_name, expected, len(args))
        try:
            return self._tables[op_name][tuple(args)]
        except KeyError:
            raise AlgebraError(f"arguments {args} of '{op_name}' are not all in the carrier") from None

    @property
    def is_ring(self) -> bool:
        return all(op in self._arity for op in ("add", "mul", "zero", "one"))

    def require_ring(self) -> None:
        if not self.is_ring:
            raise AlgebraError(f"algebra {self.name or '?'} lacks ring operations add/mul/zero/one")

    @property
    def zero(self) -> Label:
        self.require_ring()
        return self.apply("zero")

    @property
    def one(self) -> Label:
        self.require_ring()
        return self.apply("one")

    def __repr__(self) -> str:
        return f"FiniteAlgebra({self.name or len(self.carrier)}, ops={list(self._arity)})"


def cyclic_ring(n: int) -> FiniteAlgebra:
    """Z/nZ with add, mul, neg and the constants zero and one."""
    if n < 1:
        raise AlgebraError(f"Z/nZ needs n >= 1, got {n}")
    carrier = [str(i) for i in range(n)]
    ops = {
        "add": OperationTable(arity=2, table=[[str((a + b) % n) for b in range(n)] for a in range(n)]),
        "mul": OperationTable(arity=2, table=[[str((a * b) % n) for b in range(n)] for a in range(n)]),
        "neg": OperationTable(arity=1, table=[str((-a) % n) for a in range(n)]),
        "zero": OperationTable(arity=0, table="0"),
        "one": OperationTable(arity=0, table=str(1 % n)),
    }
    return FiniteAlgebra(carrier, ops, name=f"Z/{n}Z")


def nilpotent_labels(alg: FiniteAlgebra) -> List[Label]:
    """Nonzero x with x^k = 0 for some k; empty means the lifted ring has trivial radical."""
    zero = alg.zero
    found: List[Label] = []
    for x in alg.carrier:
        if x == zero:
            continue
        power = x
        seen = set()
        while power not in seen:
            if power == zero:
                found.append(x)
                break
            seen.add(power)
            power = alg.apply("mul", power, x)
    return found


# -- step functions --------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    pieces: Tuple[Tuple[IntervalSet, Label], ...]

    def __post_init__(self) -> None:
        # canonical order: by the left end of each part
        ordered = tuple(sorted(self.pieces, key=lambda piece: _first_point(piece[0])))
        object.__setattr__(self, "pieces", ordered)
        labels = [label for _, label in ordered]
        if len(set(labels)) != len(labels):
            raise StepFunctionError(f"labels must be distinct, got {labels}")
        covered = Fraction(0)
        for part, label in ordered:
            if not part:
                raise StepFunctionError(f"part for label {label!r} is empty")
            if not part.is_within(Fraction(1)):
                raise StepFunctionError(f"part for label {label!r} leaves [0,1)")
            covered += measure(part)
        # disjoint exactly when no measure is lost in the union
        if measure(union_all(part for part, _ in ordered)) != covered:
            for (a, la), (b, lb) in itertools.combinations(ordered, 2):
                if intersect(a, b):
                    raise StepFunctionError(f"parts for {la!r} and {lb!r} overlap")
        if covered != 1:
            raise StepFunctionError(f"parts cover measure {covered}, not 1")

    @classmethod
    def constant(cls, label: Label) -> "StepFunction":
        return cls(((UNIT_SET, label),))

    @classmethod
    def from_mapping(cls, parts: Mapping[Label, IntervalSet]) -> "StepFunction":
        return cls(tuple((part, label) for label, part in parts.items() if part))

    @property
    def labels(self) -> Tuple[Label, ...]:
        return tuple(label for _, label in self.pieces)

    def part(self, label: Label) -> IntervalSet:
        """f_x, the set where f takes the value x (empty if x is not attained)."""
        for part, piece_label in self.pieces:
            if piece_label == label:
                return part
        return EMPTY

    def value_at(self, t: Fraction) -> Label:
        for part, label in self.pieces:
            if part.contains(t):
                return label
        raise AmbientError(f"{t} is outside [0,1)")

    def __repr__(self) -> str:
        return "StepFunction(" + ", ".join(f"{label}:{part!r}" for part, label in self.pieces) + ")"


def _first_point(s: IntervalSet) -> Fraction:
    return s.intervals[0].lo if s.intervals else Fraction(-1)


def step_to_json_value(f: StepFunction) -> List[Dict[str, Any]]:
    return [{"part": to_json_value(part), "label": label} for part, label in f.pieces]


def step_from_json_value(value: Iterable[Mapping[str, Any]]) -> StepFunction:
    return StepFunction(tuple((from_json_value(item["part"]), str(item["label"])) for item in value))


def step_dumps(f: StepFunction) -> str:
    return json.dumps(step_to_json_value(f), separators=(",", ":"))


def common_refinement(fs: Sequence[StepFunction]) -> List[Tuple[IntervalSet, Tuple[Label, ...]]]:
    """Nonempty cells f0_{x0} ∩ ... ∩ f(n-1)_{x(n-1)} with the label tuple of each."""
    cells: List[Tuple[IntervalSet, Tuple[Label, ...]]] = [(UNIT_SET, ())]
    for f in fs:
        refined = []
        for cell, labels in cells:
            for part, label in f.pieces:
                piece = intersect(cell, part)
                if piece:
                    refined.append((piece, labels + (label,)))
        cells = refined
    return cells


def d_prime_refinement(f: StepFunction, g: StepFunction) -> Fraction:
    """Measure of the disagreement set, summed over the common refinement."""
    return sum(
        (measure(cell) for cell, (x, y) in common_refinement([f, g]) if x != y),
        Fraction(0),
    )


def d_prime_half_sum(f: StepFunction, g: StepFunction) -> Fraction:
    labels = set(f.labels) | set(g.labels)
    return sum((metric_d(f.part(x), g.part(x)) for x in labels), Fraction(0)) / 2


def d_prime(f: StepFunction, g: StepFunction) -> Fraction:
    by_refinement = d_prime_refinement(f, g)
    by_half_sum = d_prime_half_sum(f, g)
    if by_refinement != by_half_sum:
        raise ContractBreachError(
            f"d' formulas disagree: refinement {by_refinement} vs half-sum {by_half_sum}"
        )
    return by_refinement


def lift_op(alg: FiniteAlgebra, op_name: str, *args: StepFunction) -> StepFunction:
    """Pointwise operation u^[0,1]; cells with equal output label are coalesced."""
    expected = alg.arity(op_name)
    if len(args) != expected:
        raise ArityMismatchError(op_name, expected, len(args))
    grouped: Dict[Label, List[IntervalSet]] = {}
    for cell, labels in common_refinement(args):
        grouped.setdefault(alg.apply(op_name, *labels), []).append(cell)
    return StepFunction.from_mapping({label: union_all(cells) for label, cells in grouped.items()})


# -- partitions and limits -------------------------------------------------


def normalize_partition(candidates: Sequence[IntervalSet]) -> List[IntervalSet]:
    """T_i = S_i minus the earlier S_j (i > 0); T_0 takes whatever is left of [0,1)."""
    if not candidates:
        raise PartitionError("normalize_partition needs at least one set")
    for s in candidates:
        if not s.is_within(Fraction(1)):
            raise AmbientError(f"{s!r} is not inside [0,1)")
    result: List[IntervalSet] = [EMPTY]
    seen = candidates[0]
    for s in candidates[1:]:
        result.append(difference(s, seen))
        seen = union_all([seen, s])
    result[0] = difference(UNIT_SET, union_all(result[1:]))
    return result


def assemble_limit(per_label: Sequence[Tuple[Label, IntervalSet]]) -> StepFunction:
    """The step function whose part for label x_i is the normalized limit set T_i."""
    if not per_label:
        raise PartitionError("no labels to assemble", deficit=Fraction(1))
    labels = [label for label, _ in per_label]
    if len(set(labels)) != len(labels):
        raise PartitionError(f"duplicate labels in {labels}")
    for (la, a), (lb, b) in itertools.combinations(per_label, 2):
        overlap = intersect(a, b)
        if overlap:
            raise PartitionError(
                f"limit sets for {la!r} and {lb!r} overlap in {overlap!r}", overlap=(la, lb, overlap)
            )
    total = sum((measure(s) for _, s in per_label), Fraction(0))
    if total != 1:
        deficit = 1 - total
        raise PartitionError(f"limit sets miss measure {format_rational(deficit)}", deficit=deficit)
    parts = normalize_partition([s for _, s in per_label])
    return StepFunction.from_mapping(dict(zip(labels, parts)))


# -- rings: characteristic functions and bisection -------------------------


def characteristic_step(s: IntervalSet, one: Label = "1", zero: Label = "0") -> StepFunction:
    """1_S: label one on S, label zero on the rest of [0,1).

    In the zero ring one and zero coincide and 1_S is the constant function.
    """
    if one == zero:
        return StepFunction.constant(one)
    rest = complement(s, UNIT)
    return StepFunction.from_mapping({one: s, zero: rest})


def astar_distance_to_one(u: IntervalSet, alg: FiniteAlgebra) -> Fraction:
    """d'(1_{[0,1) minus U}, 1)."""
    alg.require_ring()
    idempotent = characteristic_step(complement(u, UNIT), alg.one, alg.zero)
    return d_prime(idempotent, StepFunction.constant(alg.one))


def astar_bisection_step(u: IntervalSet, alg: FiniteAlgebra, oracle: ChooserOracle) -> IntervalSet:
    """Halve U at the A* level: 1_{[0,1)\\S} · 1_{[0,1)\\T} = 1_{[0,1)\\U} picks a half."""
    alg.require_ring()
    if measure(u) == 0:
        raise NullSetError("bisection needs a set of positive measure")
    left, right = halve(u)
    one, zero = alg.one, alg.zero
    e_left = characteristic_step(complement(left, UNIT), one, zero)
    e_right = characteristic_step(complement(right, UNIT), one, zero)
    e_u = characteristic_step(complement(u, UNIT), one, zero)
    if lift_op(alg, "mul", e_left, e_right) != e_u:
        raise ContractBreachError("product of the half idempotents is not the idempotent of U")
    side = oracle.choose(left, right)
    chosen = left if side is Side.LEFT else right
    logger.debug("astar bisection | ring=%s side=%s measure=%s", alg.name, side.value, measure(chosen))
    return chosen
