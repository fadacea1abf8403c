from typing import Any, Dict, Iterable, Optional

from app.models import CheckReport, SuiteResult


def collect(
    name: str,
    reports: Iterable[CheckReport],
    detail: Optional[Dict[str, Any]] = None,
) -> SuiteResult:
    """Fold check reports into one result; passes when no report has a violation."""
    reports = list(reports)
    violations = [v for r in reports for v in r.violations]
    summary = {r.name: {"checked": r.checked, "violations": len(r.violations)} for r in reports}
    return SuiteResult(
        name=name,
        passed=not violations,
        checked=sum(r.checked for r in reports),
        violations=violations,
        detail={"reports": summary, **(detail or {})},
    )


def expect_witness(
    name: str,
    witness: Optional[Dict[str, Any]],
    checked: int,
    detail: Optional[Dict[str, Any]] = None,
) -> SuiteResult:
    """An expected-failure search passes exactly when it finds a witness."""
    return SuiteResult(
        name=name,
        passed=witness is not None,
        checked=checked,
        expected_failure=True,
        witness=witness,
        detail=detail or {},
    )
