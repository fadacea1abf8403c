from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional


class Violation(BaseModel):
    inputs: List[Any]
    lhs: str
    rhs: str


class CheckReport(BaseModel):
    name: str
    checked: int = 0
    violations: List[Violation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: "CheckReport") -> "CheckReport":
        return CheckReport(
            name=self.name,
            checked=self.checked + other.checked,
            violations=self.violations + other.violations,
        )


class Witness(BaseModel):
    x: Any
    y: Any
    z: Any
    lhs: str
    rhs: str


class SuiteResult(BaseModel):
    name: str
    passed: bool = False
    checked: int = 0
    violations: List[Violation] = Field(default_factory=list)
    expected_failure: bool = False
    witness: Optional[Dict[str, Any]] = None
    error: str = ""
    detail: Dict[str, Any] = Field(default_factory=dict)


class TypewriterRecord(BaseModel):
    k: int
    set: List[List[str]]
    measure: str
    distance_to_empty: str
    row: int
    term: Optional[int] = None


class MembershipRecord(BaseModel):
    t: str
    rows: int
    count: int


class BisectionRecord(BaseModel):
    ring: str
    step: int
    measure: str
    distance_to_one: str


class CheckedInequality(BaseModel):
    name: str
    lhs: str
    rhs: str
    ok: bool
    checked: int = 1


class ApproxRecord(BaseModel):
    epsilon: str
    h: int
    j: int
    bound: str
    element: Any
    certificate_ok: bool


class RunTranscript(BaseModel):
    scenario: str
    mode: str = "join"
    indices: List[int] = Field(default_factory=list)
    gapBounds: List[str] = Field(default_factory=list)
    joins: Dict[str, Any] = Field(default_factory=dict)
    rowLimits: Dict[str, Any] = Field(default_factory=dict)
    finalLimit: Optional[Any] = None
    checkedInequalities: List[CheckedInequality] = Field(default_factory=list)
    approx: Optional[ApproxRecord] = None


class HistoryEntry(BaseModel):
    id: int
    command: str
    exit_code: int
    timestamp: str
    config: Dict[str, Any] = Field(default_factory=dict)
    report: Any = None


class DiscontinuityRecord(BaseModel):
    singleton_distances: List[str] = Field(default_factory=list)
    pair_distances: List[str] = Field(default_factory=list)
    gap: str = "0"
    discontinuous: bool = False
    report: CheckReport
