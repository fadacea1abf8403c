from typing import Callable, Dict
import random

from app.config import RunConfig
from app.models import SuiteResult

from .boolean_ring import run_bisection, run_halving, run_typewriter
from .completion import run_completion, run_duality
from .diameter import (
    run_chain_bound,
    run_diameter_metric,
    run_dv_witness,
    run_isolation,
    run_join_discontinuity,
    run_nonconvergence,
    run_weak_join,
    run_weak_meet_lprime,
)
from .metric import run_metric_axioms, run_ring_continuity
from .step_functions import run_identities, run_lipschitz_lift, run_partition

Suite = Callable[[RunConfig, random.Random], SuiteResult]

# registry order is report order
SUITES: Dict[str, Suite] = {
    "metric-axioms": run_metric_axioms,
    "ring-continuity": run_ring_continuity,
    "halving": run_halving,
    "typewriter": run_typewriter,
    "bisection": run_bisection,
    "lipschitz-lift": run_lipschitz_lift,
    "identities": run_identities,
    "partition": run_partition,
    "completion": run_completion,
    "duality": run_duality,
    "diameter-metric": run_diameter_metric,
    "weak-join": run_weak_join,
    "dv-witness": run_dv_witness,
    "weak-meet-lprime": run_weak_meet_lprime,
    "nonconvergence": run_nonconvergence,
    "join-discontinuity": run_join_discontinuity,
    "isolation": run_isolation,
    "chain-bound": run_chain_bound,
}
