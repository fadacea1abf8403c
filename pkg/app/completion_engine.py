"""Limits of Cauchy sequences in a metrized lattice, built from monotone limits.

Given a GapCertificate x_0, x_1, ... over a carrier satisfying the Lipschitz
join inequality, the engine forms

    x_{h,j}   = x_h ∨ ... ∨ x_j        running joins, increasing in j
    x_{h,∞}   = lim_j x_{h,j}          row limits, decreasing in h
    x_{∞,∞}   = lim_h x_{h,∞}          the limit of the original sequence

and checks every distance bound the construction promises on the
materialized indices 0..horizon. Monotone limits come from an oracle, since
their existence is a property of the carrier rather than something to
compute. approx_limit needs no oracle at all and works in incomplete carriers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, TypeVar

from app.algebra_star import Label, StepFunction, assemble_limit, step_to_json_value
from app.errors import ContractBreachError, HorizonExceededError, WeakCarrierError
from app.interval_sets import EMPTY, IntervalSet, format_rational, interval, to_rational, union_all
from app.logger import get_logger
from app.measure_algebra import row_start, typewriter
from app.metrized_lattice import (
    DEFAULT_HORIZON,
    DualCarrier,
    GapCertificate,
    Hypothesis,
    IntervalSetCarrier,
    MetrizedJoinCarrier,
    StepFunctionSpace,
    leq,
)
from app.models import ApproxRecord, CheckedInequality, CheckReport, RunTranscript, Violation

logger = get_logger(__name__)

T = TypeVar("T")

DEFAULT_EPSILON = Fraction(1, 256)
DEFAULT_WINDOW = 4
TRANSCRIPT_DEPTH = 8

JoinMemo = Dict[Tuple[int, int], Any]

# inequality families checked by verify_run, in report order
JOIN_STEP = "join_step_bound"
JOIN_WINDOW = "join_window_bound"
ROW_LIMIT = "row_limit_bound"
ROWS_DECREASING = "row_limits_decreasing"
ROW_GAP = "row_limit_gap_bound"
FINAL = "final_limit_bound"
KNOWN = "final_limit_exact"
FAMILIES = (JOIN_STEP, JOIN_WINDOW, ROW_LIMIT, ROWS_DECREASING, ROW_GAP, FINAL, KNOWN)


# -- running joins and certified approximation -----------------------------


def running_join(cert: GapCertificate, h: int, j: int, memo: Optional[JoinMemo] = None) -> Any:
    """x_{h,j} = x_h ∨ ... ∨ x_j, extended from the longest memoized prefix."""
    if h < 0 or h > j:
        raise ValueError(f"running join needs 0 <= h <= j, got h={h} j={j}")
    if memo is None:
        memo = {}
    if (h, j) in memo:
        return memo[(h, j)]
    k = j
    while k > h and (h, k) not in memo:
        k -= 1
    if (h, k) in memo:
        acc = memo[(h, k)]
    else:
        acc = cert.term(h)
        memo[(h, h)] = acc
    for m in range(k + 1, j + 1):
        acc = cert.carrier.join(acc, cert.term(m))
        memo[(h, m)] = acc
    return acc


class ApproxLimit(NamedTuple):
    element: Any
    h: int
    bound: Fraction
    j: int
    certified: bool


def approx_limit(
    cert: GapCertificate,
    epsilon: Fraction | str | int,
    horizon: int = DEFAULT_HORIZON,
    memo: Optional[JoinMemo] = None,
) -> ApproxLimit:
    """y = x_{h,j} for the least h with 2·tail(h) <= ε, and j = max(h, horizon).

    Every x_m with h <= m <= j is checked to lie within 2·tail(h) of y; no
    limit object is involved.
    """
    epsilon = to_rational(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    h = next((k for k in range(horizon + 1) if 2 * cert.tail(k) <= epsilon), None)
    if h is None:
        raise HorizonExceededError(epsilon, horizon)
    j = max(h, horizon)
    bound = 2 * cert.tail(h)
    y = running_join(cert, h, j, memo)
    for m in range(h, j + 1):
        dist = cert.carrier.dist(cert.term(m), y)
        if dist > bound:
            raise ContractBreachError(
                f"approximate limit is {format_rational(dist)} from term {m}, over the bound {format_rational(bound)}"
            )
    logger.debug("approx_limit | eps=%s h=%d j=%d bound=%s", epsilon, h, j, bound)
    return ApproxLimit(element=y, h=h, bound=bound, j=j, certified=True)


# -- monotone limit oracles ------------------------------------------------


class MonotoneLimitOracle:
    """Resolves monotone Cauchy sequences; None means the limit is unavailable."""

    def increasing_limit(self, seq: Callable[[int], Any], *, row: int) -> Optional[Any]:
        return None

    def decreasing_limit(self, seq: Callable[[int], Any]) -> Optional[Any]:
        return None


class StabilizationOracle(MonotoneLimitOracle):
    """Returns the value once a sequence repeats it ``window`` times in a row."""

    def __init__(self, window: int = DEFAULT_WINDOW, horizon: int = DEFAULT_HORIZON):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self.horizon = horizon

    def _stable_value(self, seq: Callable[[int], Any], start: int) -> Optional[Any]:
        run_value, run_length = None, 0
        for k in range(start, start + self.horizon + self.window):
            value = seq(k)
            if run_length and value == run_value:
                run_length += 1
            else:
                run_value, run_length = value, 1
            if run_length >= self.window:
                return run_value
        return None

    def increasing_limit(self, seq, *, row):
        return self._stable_value(seq, row)

    def decreasing_limit(self, seq):
        return self._stable_value(seq, 0)


_UNSET = object()


class InjectedOracle(MonotoneLimitOracle):
    """Analytically known limits, falling back to another oracle where none is given."""

    def __init__(
        self,
        increasing: Optional[Callable[[int], Any]] = None,
        decreasing: Any = _UNSET,
        fallback: Optional[MonotoneLimitOracle] = None,
    ):
        self.increasing = increasing
        self.decreasing = decreasing
        self.fallback = fallback or StabilizationOracle()

    def increasing_limit(self, seq, *, row):
        if self.increasing is not None:
            return self.increasing(row)
        return self.fallback.increasing_limit(seq, row=row)

    def decreasing_limit(self, seq):
        if self.decreasing is not _UNSET:
            return self.decreasing
        return self.fallback.decreasing_limit(seq)


# -- the pipeline ----------------------------------------------------------


@dataclass
class CompletionRun:
    certificate: GapCertificate
    horizon: int
    joins: JoinMemo = field(default_factory=dict)
    row_limits: Dict[int, Any] = field(default_factory=dict)
    final_limit: Optional[Any] = None
    approx: Optional[ApproxLimit] = None
    known_limit: Optional[Any] = None

    @property
    def carrier(self) -> MetrizedJoinCarrier:
        return self.certificate.carrier

    @property
    def error_bound(self) -> Fraction:
        """2·tail(0): every term lies this close to the final limit."""
        return 2 * self.certificate.tail(0)

    def bound_at(self, h: int) -> Fraction:
        return 2 * self.certificate.tail(h)

    def join(self, h: int, j: int) -> Any:
        return running_join(self.certificate, h, j, self.joins)


def full_tlat_pipeline(
    cert: GapCertificate,
    oracle: MonotoneLimitOracle,
    horizon: int = DEFAULT_HORIZON,
    epsilon: Optional[Fraction] = DEFAULT_EPSILON,
    known_limit: Optional[Any] = None,
) -> CompletionRun:
    """Materialize joins and row limits up to the horizon, then the double limit.

    The carrier must be registered with the Lipschitz join inequality; weaker
    carriers are refused. When the oracle cannot resolve a limit the run still
    completes, with final_limit None and only the approximate limit filled in.
    """
    carrier = cert.carrier
    if Hypothesis.JOIN_LIPSCHITZ not in getattr(carrier, "hypotheses", frozenset()):
        raise WeakCarrierError(
            f"carrier {carrier.name} is not registered with join_lipschitz; the completion bounds need it"
        )
    started = time.perf_counter()
    logger.info("Completion start | certificate=%s horizon=%d", cert.name, horizon)
    run = CompletionRun(certificate=cert, horizon=horizon, known_limit=known_limit)

    for h in range(horizon + 1):
        run.join(h, horizon)

    unavailable = False

    def row_limit(h: int) -> Any:
        nonlocal unavailable
        if h not in run.row_limits:
            limit = oracle.increasing_limit(lambda j: run.join(h, j), row=h)
            if limit is None:
                unavailable = True
                return None
            run.row_limits[h] = limit
        return run.row_limits[h]

    for h in range(horizon + 1):
        row_limit(h)
    if not unavailable:
        final = oracle.decreasing_limit(row_limit)
        run.final_limit = None if unavailable else final

    if epsilon is not None:
        try:
            run.approx = approx_limit(cert, epsilon, horizon, run.joins)
        except HorizonExceededError as exc:
            logger.warning("Approximate limit skipped | certificate=%s reason=%s", cert.name, exc)

    logger.info(
        "Completion done  | certificate=%s final=%s elapsed=%.2fs",
        cert.name,
        "available" if run.final_limit is not None else "unavailable",
        time.perf_counter() - started,
    )
    return run


class _Family:
    """Tally for one inequality family: count, violations and the tightest instance."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.violations: List[Violation] = []
        self.tightest: Optional[Tuple[Fraction, Fraction]] = None

    def record(self, lhs: Fraction, rhs: Fraction, inputs: List[Any]) -> None:
        self.checked += 1
        if self.tightest is None or rhs - lhs < self.tightest[1] - self.tightest[0]:
            self.tightest = (lhs, rhs)
        if lhs > rhs:
            self.violations.append(
                Violation(inputs=[self.name, *inputs], lhs=format_rational(lhs), rhs=format_rational(rhs))
            )

    def record_flag(self, ok: bool, inputs: List[Any]) -> None:
        self.record(Fraction(0 if ok else 1), Fraction(0), inputs)

    def summary(self) -> CheckedInequality:
        lhs, rhs = self.tightest or (Fraction(0), Fraction(0))
        return CheckedInequality(
            name=self.name,
            lhs=format_rational(lhs),
            rhs=format_rational(rhs),
            ok=not self.violations,
            checked=self.checked,
        )


def _check_families(run: CompletionRun) -> List[_Family]:
    cert, carrier, n = run.certificate, run.carrier, run.horizon
    families = {name: _Family(name) for name in FAMILIES}
    x = [cert.term(i) for i in range(n + 1)]
    gaps = [carrier.dist(x[i], x[i + 1]) for i in range(n)]
    prefix = [Fraction(0)]
    for g in gaps:
        prefix.append(prefix[-1] + g)

    for h in range(n + 1):
        for j in range(h, n):
            families[JOIN_STEP].record(carrier.dist(run.join(h, j), run.join(h, j + 1)), gaps[j], [h, j])
        for j in range(h, n + 1):
            for k in range(j + 1, n + 1):
                families[JOIN_WINDOW].record(
                    carrier.dist(run.join(h, j), run.join(h, k)), prefix[k] - prefix[j], [h, j, k]
                )

    rows = {h: run.row_limits[h] for h in range(n + 1) if h in run.row_limits}
    for h, limit in rows.items():
        for j in range(h, n + 1):
            families[ROW_LIMIT].record(carrier.dist(run.join(h, j), limit), cert.tail(j), [h, j])
    for h in rows:
        for i in rows:
            if i <= h:
                continue
            families[ROWS_DECREASING].record_flag(leq(carrier, rows[i], rows[h]), [h, i])
            families[ROW_GAP].record(carrier.dist(rows[h], rows[i]), cert.tail(h) - cert.tail(i), [h, i])

    if run.final_limit is not None:
        for h in range(n + 1):
            families[FINAL].record(carrier.dist(x[h], run.final_limit), run.bound_at(h), [h])
        if run.known_limit is not None:
            families[KNOWN].record(carrier.dist(run.final_limit, run.known_limit), Fraction(0), [])

    return [families[name] for name in FAMILIES if families[name].checked]


def verify_run(run: CompletionRun) -> CheckReport:
    """Check every inequality family exactly; each violation names its family first."""
    families = _check_families(run)
    return CheckReport(
        name=f"verify_run[{run.certificate.name}]",
        checked=sum(f.checked for f in families),
        violations=[v for f in families for v in f.violations],
    )


def inequality_table(run: CompletionRun) -> List[CheckedInequality]:
    return [f.summary() for f in _check_families(run)]


def corrupt_run(run: CompletionRun, h: int = 1, j: int = 2, value: Any = None) -> CompletionRun:
    """Copy of the run with the memoized x_{h,j} overwritten (x_0 unless given)."""
    joins = dict(run.joins)
    joins[(h, j)] = run.certificate.term(0) if value is None else value
    logger.debug("Run corrupted | certificate=%s h=%d j=%d", run.certificate.name, h, j)
    return replace(run, joins=joins, row_limits=dict(run.row_limits))


# -- step functions: per-label completion ----------------------------------


def label_certificate(cert: GapCertificate[StepFunction], label: Label, carrier: MetrizedJoinCarrier) -> GapCertificate:
    """The sets f_x of one label; d(f_x, g_x) <= 2·d'(f, g) doubles the bounds."""
    return GapCertificate(
        carrier,
        lambda i: cert.term(i).part(label),
        gap_bound=lambda i: 2 * cert.gap_bound(i),
        tail=lambda h: 2 * cert.tail(h),
        source_index=cert.source_index,
        name=f"{cert.name}[{label}]",
    )


@dataclass
class StepCompletion:
    runs: Dict[Label, CompletionRun]
    limit: Optional[StepFunction]


def complete_step_sequence(
    cert: GapCertificate[StepFunction],
    labels: Sequence[Label],
    oracles: Mapping[Label, MonotoneLimitOracle],
    horizon: int = DEFAULT_HORIZON,
    carrier: Optional[MetrizedJoinCarrier] = None,
    known_parts: Optional[Mapping[Label, IntervalSet]] = None,
) -> StepCompletion:
    """Complete each label's sets in the interval-set lattice, then assemble the limit."""
    carrier = carrier or IntervalSetCarrier()
    runs: Dict[Label, CompletionRun] = {}
    for label in labels:
        runs[label] = full_tlat_pipeline(
            label_certificate(cert, label, carrier),
            oracles[label],
            horizon,
            epsilon=None,
            known_limit=(known_parts or {}).get(label),
        )
    if any(run.final_limit is None for run in runs.values()):
        return StepCompletion(runs=runs, limit=None)
    limit = assemble_limit([(label, runs[label].final_limit) for label in labels])
    return StepCompletion(runs=runs, limit=limit)


# -- built-in scenarios ----------------------------------------------------


@dataclass
class Scenario:
    name: str
    mode: str
    certificate: GapCertificate
    oracle: MonotoneLimitOracle
    known_limit: Any


@dataclass
class StepScenario:
    name: str
    mode: str
    certificate: GapCertificate[StepFunction]
    labels: Tuple[Label, ...]
    oracles: Dict[Label, MonotoneLimitOracle]
    carrier: MetrizedJoinCarrier
    target: StepFunction


MODES = ("join", "dual")


def _carrier(mode: str) -> MetrizedJoinCarrier:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    base = IntervalSetCarrier()
    return base if mode == "join" else DualCarrier(base)


def typewriter_scenario(mode: str = "join") -> Scenario:
    """First terms of rows 2^i of the typewriter: [0, 2^-i), limit ∅."""
    carrier = _carrier(mode)
    cert = GapCertificate.geometric(
        carrier,
        lambda i: typewriter(row_start(2**i)).set,
        first_gap=Fraction(1, 2),
        source_index=lambda i: row_start(2**i),
        name=f"typewriter/{mode}",
    )
    if mode == "join":
        # rows are constant in j; the row limits [0, 2^-h) shrink to ∅
        oracle = InjectedOracle(decreasing=EMPTY)
    else:
        oracle = InjectedOracle(increasing=lambda row: EMPTY)
    return Scenario("typewriter", mode, cert, oracle, EMPTY)


def _increasing_term(i: int) -> IntervalSet:
    return interval(0, 1 - Fraction(1, 2**i)) if i else EMPTY


def increasing_sets_scenario(mode: str = "join") -> Scenario:
    """[0, 1 - 2^-i) increasing to [0,1)."""
    carrier = _carrier(mode)
    cert = GapCertificate.geometric(carrier, _increasing_term, first_gap=Fraction(1, 2), name=f"increasing_sets/{mode}")
    unit = interval(0, 1)
    if mode == "join":
        oracle = InjectedOracle(increasing=lambda row: unit)
    else:
        oracle = InjectedOracle(decreasing=unit)
    return Scenario("increasing_sets", mode, cert, oracle, unit)


STEP_TARGET = StepFunction.from_mapping(
    {
        "a": interval(0, Fraction(1, 3)),
        "b": interval(Fraction(1, 3), Fraction(2, 3)),
        "c": interval(Fraction(2, 3), 1),
    }
)


def _step_term(i: int) -> StepFunction:
    # the target with [0, 2^-(i+2)) moved from label a to label b
    cut = Fraction(1, 2 ** (i + 2))
    return StepFunction.from_mapping(
        {
            "a": interval(cut, Fraction(1, 3)),
            "b": union_all([interval(0, cut), interval(Fraction(1, 3), Fraction(2, 3))]),
            "c": interval(Fraction(2, 3), 1),
        }
    )


def step_function_scenario(mode: str = "join") -> StepScenario:
    """Step functions converging to a three-label target; completed label by label."""
    carrier = _carrier(mode)
    cert = GapCertificate.geometric(
        StepFunctionSpace(), _step_term, first_gap=Fraction(1, 4), name=f"step_function/{mode}"
    )
    a, b = STEP_TARGET.part("a"), STEP_TARGET.part("b")
    if mode == "join":
        # a grows towards its target part, b shrinks towards it
        oracles: Dict[Label, MonotoneLimitOracle] = {
            "a": InjectedOracle(increasing=lambda row: a),
            "b": InjectedOracle(decreasing=b),
            "c": StabilizationOracle(),
        }
    else:
        oracles = {
            "a": InjectedOracle(decreasing=a),
            "b": InjectedOracle(increasing=lambda row: b),
            "c": StabilizationOracle(),
        }
    return StepScenario("step_function", mode, cert, ("a", "b", "c"), oracles, carrier, STEP_TARGET)


SCENARIOS: Dict[str, Callable[[str], Any]] = {
    "typewriter": typewriter_scenario,
    "increasing_sets": increasing_sets_scenario,
    "step_function": step_function_scenario,
}


# -- transcripts -----------------------------------------------------------


def _encode(carrier: Any, value: Any) -> Any:
    return None if value is None else carrier.encode(value)


def _approx_record(run: CompletionRun, epsilon: Fraction) -> Optional[ApproxRecord]:
    if run.approx is None:
        return None
    return ApproxRecord(
        epsilon=format_rational(epsilon),
        h=run.approx.h,
        j=run.approx.j,
        bound=format_rational(run.approx.bound),
        element=run.carrier.encode(run.approx.element),
        certificate_ok=run.approx.certified,
    )


def transcript(run: CompletionRun, scenario: str, mode: str, epsilon: Fraction = DEFAULT_EPSILON, depth: int = TRANSCRIPT_DEPTH) -> RunTranscript:
    """JSON-ready record of the first ``depth`` indices plus the full inequality table."""
    cert, carrier = run.certificate, run.carrier
    shown = range(min(depth, run.horizon + 1))
    return RunTranscript(
        scenario=scenario,
        mode=mode,
        indices=[cert.source_index(i) for i in shown],
        gapBounds=[format_rational(cert.gap_bound(i)) for i in shown],
        joins={f"{h},{j}": carrier.encode(run.join(h, j)) for h in shown for j in shown if h <= j},
        rowLimits={str(h): _encode(carrier, run.row_limits.get(h)) for h in shown},
        finalLimit=_encode(carrier, run.final_limit),
        checkedInequalities=inequality_table(run),
        approx=_approx_record(run, epsilon),
    )


def step_transcript(scenario: StepScenario, completion: StepCompletion, depth: int = TRANSCRIPT_DEPTH) -> RunTranscript:
    cert = scenario.certificate
    shown = range(min(depth, next(iter(completion.runs.values())).horizon + 1))
    joins: Dict[str, Any] = {}
    rows: Dict[str, Any] = {}
    table: List[CheckedInequality] = []
    for label, run in completion.runs.items():
        joins.update({f"{label}|{h},{j}": run.carrier.encode(run.join(h, j)) for h in shown for j in shown if h <= j})
        rows.update({f"{label}|{h}": _encode(run.carrier, run.row_limits.get(h)) for h in shown})
        for entry in inequality_table(run):
            table.append(entry.model_copy(update={"name": f"{label}:{entry.name}"}))
    return RunTranscript(
        scenario=scenario.name,
        mode=scenario.mode,
        indices=[cert.source_index(i) for i in shown],
        gapBounds=[format_rational(cert.gap_bound(i)) for i in shown],
        joins=joins,
        rowLimits=rows,
        finalLimit=None if completion.limit is None else step_to_json_value(completion.limit),
        checkedInequalities=table,
    )


class ScenarioOutcome(NamedTuple):
    transcript: RunTranscript
    report: CheckReport


def run_scenario(
    name: str,
    mode: str = "join",
    horizon: int = DEFAULT_HORIZON,
    epsilon: Fraction = DEFAULT_EPSILON,
    corrupt: bool = False,
) -> ScenarioOutcome:
    """Build, complete and verify one built-in scenario."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    scenario = SCENARIOS[name](mode)
    if isinstance(scenario, StepScenario):
        completion = complete_step_sequence(
            scenario.certificate,
            scenario.labels,
            scenario.oracles,
            horizon,
            carrier=scenario.carrier,
            known_parts={label: scenario.target.part(label) for label in scenario.labels},
        )
        if corrupt:
            first = scenario.labels[0]
            completion.runs[first] = corrupt_run(completion.runs[first])
        report = CheckReport(name=f"verify_run[{scenario.certificate.name}]")
        for run in completion.runs.values():
            report = report.merge(verify_run(run))
        if completion.limit is not None:
            report.checked += 1
            if completion.limit != scenario.target:
                report.violations.append(
                    Violation(inputs=[KNOWN, step_to_json_value(completion.limit)], lhs="1", rhs="0")
                )
        return ScenarioOutcome(step_transcript(scenario, completion), report)

    run = full_tlat_pipeline(scenario.certificate, scenario.oracle, horizon, epsilon, known_limit=scenario.known_limit)
    if corrupt:
        run = corrupt_run(run)
    return ScenarioOutcome(transcript(run, scenario.name, mode, epsilon), verify_run(run))
