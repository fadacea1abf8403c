import random
from typing import List

from app.completion_engine import SCENARIOS, InjectedOracle, full_tlat_pipeline, run_scenario
from app.config import RunConfig
from app.counterexamples import DiameterCarrier, harmonic_space, subset
from app.errors import WeakCarrierError
from app.interval_sets import EMPTY, format_rational, from_json_value, metric_d
from app.logger import get_logger
from app.metrized_lattice import GapCertificate
from app.models import CheckReport, SuiteResult, Violation
from app.suites.common import collect

logger = get_logger(__name__)

# inequalities are checked for every h <= this depth
COMPLETION_DEPTH = 32


def _scenarios(config: RunConfig, mode: str) -> List[CheckReport]:
    depth = min(config.horizon, COMPLETION_DEPTH)
    reports = []
    for name in SCENARIOS:
        outcome = run_scenario(name, mode, horizon=depth, epsilon=config.epsilon)
        report = outcome.report.model_copy(update={"name": f"{name}/{mode}"})
        if outcome.transcript.finalLimit is None:
            report.violations.append(Violation(inputs=[name, mode], lhs="unavailable", rhs="final limit"))
        reports.append(report)

        approx = outcome.transcript.approx
        if name == "typewriter" and approx is not None:
            # the approximate limit sits within epsilon of the true limit ∅
            check = CheckReport(name=f"approx/{mode}", checked=1)
            dist = metric_d(from_json_value(approx.element), EMPTY)
            if dist > config.epsilon or not approx.certificate_ok:
                check.violations.append(
                    Violation(inputs=[approx.element], lhs=format_rational(dist), rhs=format_rational(config.epsilon))
                )
            reports.append(check)
    return reports


def run_completion(config: RunConfig, rng: random.Random) -> SuiteResult:
    """The built-in scenarios complete with every bound verified; weak carriers are refused."""
    reports = _scenarios(config, "join")

    refusal = CheckReport(name="weak_carrier_refused", checked=1)
    space = harmonic_space(4)
    cert = GapCertificate.constant(DiameterCarrier(space), subset(*space.points[:1]))
    try:
        full_tlat_pipeline(cert, InjectedOracle(), horizon=4)
        refusal.violations.append(Violation(inputs=[cert.carrier.name], lhs="ran", rhs="refused"))
    except WeakCarrierError:
        logger.debug("Weak carrier refused as expected | carrier=%s", cert.carrier.name)
    reports.append(refusal)
    return collect("completion", reports, detail={"depth": min(config.horizon, COMPLETION_DEPTH)})


def run_duality(config: RunConfig, rng: random.Random) -> SuiteResult:
    """The same scenarios on the order dual, with intersection as join."""
    return collect("duality", _scenarios(config, "dual"), detail={"depth": min(config.horizon, COMPLETION_DEPTH)})
