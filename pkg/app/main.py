"""Command-line entry point: demonstrations and property suites.

    python -m app.main demo-typewriter [--rows N] [--stretched] [--point p/q ...]
    python -m app.main demo-bisection [--steps N] [--seed S]
    python -m app.main demo-completion [--epsilon p/q] [--mode join|dual]
    python -m app.main check-properties [--suite NAME ...] [--samples N]
    python -m app.main history [--limit N] [--search TEXT]

Reports go to stdout (text, or newline-delimited JSON with --output json);
logs go to stderr. Exit codes: 0 all assertions hold, 1 an assertion failed,
2 bad configuration.
"""

import argparse
import asyncio
import json
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

from pydantic import BaseModel

from app.algebra_star import astar_bisection_step, astar_distance_to_one, cyclic_ring
from app.completion_engine import MODES, SCENARIOS, run_scenario
from app.config import RunConfig, build_config
from app.database import get_history, save_run, search_history
from app.errors import ConfigError
from app.interval_sets import EMPTY, format_rational, interval, measure, metric_d, to_json_value
from app.logger import get_logger
from app.measure_algebra import (
    SeededOracle,
    bisection_ladder,
    membership_count,
    stretched_term_index,
    typewriter,
    typewriter_row,
)
from app.models import BisectionRecord, MembershipRecord, SuiteResult, TypewriterRecord
from app.pipeline import run_suites
from app.suites import SUITES

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

BISECTION_RING = 6


class Report:
    """Records collected by a command, plus whether every assertion held."""

    def __init__(self, command: str):
        self.command = command
        self.records: List[Dict[str, Any]] = []
        self.lines: List[str] = []
        self.ok = True

    def add(self, kind: str, record: BaseModel | Dict[str, Any]) -> None:
        data = record.model_dump() if isinstance(record, BaseModel) else dict(record)
        self.records.append({"kind": kind, **data})

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def fail(self, message: str) -> None:
        self.ok = False
        self.say(f"FAIL {message}")

    def emit(self, output: str, out: TextIO) -> None:
        if output == "json":
            for record in self.records:
                out.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                out.write(line + "\n")

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.ok else EXIT_VIOLATION


# -- commands --------------------------------------------------------------


def cmd_demo_typewriter(config: RunConfig) -> Report:
    report = Report("demo-typewriter")
    count = config.rows * (config.rows + 1) // 2
    label = "stretched typewriter" if config.stretched else "typewriter"
    report.say(f"{label}: first {count} terms (rows 1..{config.rows})")
    for k in range(1, count + 1):
        term = stretched_term_index(k) if config.stretched else k
        n, _ = typewriter_row(term)
        s = typewriter(term).set
        record = TypewriterRecord(
            k=k,
            set=to_json_value(s),
            measure=format_rational(measure(s)),
            distance_to_empty=format_rational(metric_d(s, EMPTY)),
            row=n,
            term=term if config.stretched else None,
        )
        report.add("typewriter", record)
        suffix = f"  (term {term})" if config.stretched else ""
        report.say(f"  k={k:<5} {s!r:<24} measure={record.measure:<6} d(.,∅)={record.distance_to_empty}{suffix}")
        if measure(s) != Fraction(1, n):
            report.fail(f"term {k} has measure {record.measure}, expected 1/{n}")

    for t in config.points:
        if not 0 <= t < 1:
            raise ConfigError(f"membership point {format_rational(t)} is outside [0,1)")
        hits = membership_count(t, config.rows)
        report.add("membership", MembershipRecord(t=format_rational(t), rows=config.rows, count=hits))
        report.say(f"  t={format_rational(t)} lies in {hits} of the terms in rows 1..{config.rows}")
        if hits != config.rows:
            report.fail(f"t={format_rational(t)} covered {hits} times, expected once per row")
    return report


def cmd_demo_bisection(config: RunConfig) -> Report:
    report = Report("demo-bisection")
    unit = interval(0, 1)
    ring = cyclic_ring(BISECTION_RING)
    report.say(f"bisection from [0,1) for {config.steps} steps, seed {config.seed}")

    for step, u, dist in bisection_ladder(unit, SeededOracle(config.seed), config.steps):
        record = BisectionRecord(ring="B", step=step, measure=format_rational(measure(u)), distance_to_one=format_rational(dist))
        report.add("bisection", record)
        report.say(f"  B      step={step:<3} U={u!r:<28} d(1+U,1)={record.distance_to_one}")
        if dist != Fraction(1, 2**step):
            report.fail(f"B step {step}: distance {record.distance_to_one}, expected 1/{2**step}")

    oracle = SeededOracle(config.seed)
    u = unit
    for step in range(config.steps + 1):
        if step:
            u = astar_bisection_step(u, ring, oracle)
        dist = astar_distance_to_one(u, ring)
        record = BisectionRecord(ring=ring.name, step=step, measure=format_rational(measure(u)), distance_to_one=format_rational(dist))
        report.add("bisection", record)
        report.say(f"  {ring.name:<6} step={step:<3} U={u!r:<28} d'(1_U',1)={record.distance_to_one}")
        if dist != Fraction(1, 2**step):
            report.fail(f"{ring.name} step {step}: distance {record.distance_to_one}, expected 1/{2**step}")
    return report


def cmd_demo_completion(config: RunConfig, mode: str = "join") -> Report:
    report = Report("demo-completion")
    for name in SCENARIOS:
        outcome = run_scenario(
            name,
            mode,
            horizon=config.horizon,
            epsilon=config.epsilon,
            corrupt=config.corrupt and name == "typewriter",
        )
        transcript = outcome.transcript
        report.add("transcript", transcript)
        report.say(f"scenario {name} ({mode}), horizon {config.horizon}")
        report.say(f"  final limit: {json.dumps(transcript.finalLimit)}")
        for row in transcript.checkedInequalities:
            mark = "ok " if row.ok else "BAD"
            report.say(f"  [{mark}] {row.name:<32} tightest {row.lhs} <= {row.rhs}  ({row.checked} checked)")
        if transcript.approx is not None:
            a = transcript.approx
            report.say(f"  approx eps={a.epsilon}: h={a.h} j={a.j} bound={a.bound} element={json.dumps(a.element)}")
        if not outcome.report.passed:
            families = sorted({str(v.inputs[0]) for v in outcome.report.violations})
            report.fail(f"{name}: violated {', '.join(families)}")
    return report


def cmd_check_properties(config: RunConfig, suites: Optional[Sequence[str]] = None) -> Report:
    report = Report("check-properties")

    def _on_progress(done: int, total: int, result: SuiteResult) -> None:
        logger.info("Progress %d/%d | %s passed=%s", done, total, result.name, result.passed)

    results = asyncio.run(run_suites(suites, config, on_progress=_on_progress))
    report.say(f"{'suite':<20} {'result':<8} {'checked':>9}  note")
    for result in results:
        report.add("suite", result)
        status = "pass" if result.passed else "FAIL"
        note = ""
        if result.expected_failure and result.witness:
            note = "witness " + json.dumps(result.witness, sort_keys=True)
        elif result.error:
            note = result.error
        elif result.violations:
            note = f"{len(result.violations)} violations, first {result.violations[0].model_dump()}"
        report.say(f"{result.name:<20} {status:<8} {result.checked:>9}  {note}")
        if not result.passed:
            report.ok = False
    failed = [r.name for r in results if not r.passed]
    report.add("summary", {"passed": not failed, "suites": len(results), "failed": failed})
    report.say(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return report


def cmd_history(config: RunConfig, limit: int, search: Optional[str]) -> Report:
    report = Report("history")
    if not config.history_db:
        raise ConfigError("no history database configured; set WORKBENCH_HISTORY_DB or pass --history-db")
    entries = search_history(config.history_db, search, limit) if search else get_history(config.history_db, limit)
    for entry in entries:
        report.add("history", entry)
        report.say(f"#{entry.id:<5} {entry.timestamp}  {entry.command:<18} exit={entry.exit_code}")
    if not entries:
        report.say("no runs recorded")
    return report


# -- argument parsing ------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--horizon", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--size-cap", dest="size_cap", type=int)
    common.add_argument("--output", choices=["text", "json"])
    common.add_argument("--epsilon", help="positive rational p/q")
    common.add_argument("--history-db", dest="history_db")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="app.main", description="Metrized lattice workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    tw = sub.add_parser("demo-typewriter", parents=[common], help="typewriter sequence terms and coverage")
    tw.add_argument("--rows", type=int)
    tw.add_argument("--stretched", action="store_true", default=None)
    tw.add_argument("--point", dest="points", action="append", help="point t to test membership at (repeatable)")

    bis = sub.add_parser("demo-bisection", parents=[common], help="prime-ideal bisection ladder")
    bis.add_argument("--steps", type=int)

    comp = sub.add_parser("demo-completion", parents=[common], help="completion of the built-in scenarios")
    comp.add_argument("--mode", choices=list(MODES), default="join")
    comp.add_argument("--corrupt", action="store_true", default=None, help=argparse.SUPPRESS)

    chk = sub.add_parser("check-properties", parents=[common], help="run the property suites")
    chk.add_argument("--suite", dest="suites", action="append", choices=list(SUITES))

    hist = sub.add_parser("history", parents=[common], help="list or search recorded runs")
    hist.add_argument("--limit", type=int, default=10)
    hist.add_argument("--search")
    return parser


CONFIG_KEYS = (
    "seed", "horizon", "samples", "size_cap", "output", "epsilon",
    "history_db", "rows", "stretched", "points", "steps", "corrupt",
)


def _dispatch(args: argparse.Namespace, config: RunConfig) -> Report:
    commands: Dict[str, Callable[[], Report]] = {
        "demo-typewriter": lambda: cmd_demo_typewriter(config),
        "demo-bisection": lambda: cmd_demo_bisection(config),
        "demo-completion": lambda: cmd_demo_completion(config, args.mode),
        "check-properties": lambda: cmd_check_properties(config, args.suites),
        "history": lambda: cmd_history(config, args.limit, args.search),
    }
    return commands[args.command]()


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        overrides = {key: getattr(args, key, None) for key in CONFIG_KEYS}
        overrides["command"] = args.command
        if args.command == "check-properties" and args.suites:
            overrides["suite"] = ",".join(args.suites)
        config = build_config(overrides)
        report = _dispatch(args, config)
    except ConfigError as e:
        logger.error("Configuration error | %s", e)
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    report.emit(config.output, out)
    if config.history_db and args.command != "history":
        try:
            save_run(config.history_db, args.command, config.model_dump(), report.records, report.exit_code)
        except Exception as e:
            logger.warning("Could not record run | db=%s error=%s", config.history_db, e)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
