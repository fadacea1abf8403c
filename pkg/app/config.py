"""Run configuration: environment defaults from .env, overridden by CLI flags."""

import os
from fractions import Fraction
from typing import Any, Dict, List, Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, field_validator

from app.errors import ConfigError, MalformedIntervalError
from app.interval_sets import format_rational, parse_rational
from app.logger import get_logger

logger = get_logger(__name__)


class RunConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str = "check-properties"
    seed: int = 0
    horizon: int = Field(default=64, ge=1)
    samples: int = Field(default=10000, ge=1)
    size_cap: int = Field(default=4, ge=1)
    output: str = "text"
    epsilon: Fraction = Fraction(1, 256)
    suite: Optional[str] = None
    stretched: bool = False
    rows: int = Field(default=50, ge=1)
    steps: int = Field(default=10, ge=0)
    points: List[Fraction] = Field(default_factory=lambda: [Fraction(1, 7)])
    corrupt: bool = False
    history_db: Optional[str] = None

    @field_validator("output")
    @classmethod
    def _output_kind(cls, v: str) -> str:
        if v not in ("text", "json"):
            raise ValueError(f"output must be 'text' or 'json', got {v!r}")
        return v

    @field_validator("epsilon", mode="before")
    @classmethod
    def _parse_epsilon(cls, v: Any) -> Fraction:
        q = _rational(v)
        if q <= 0:
            raise ValueError(f"epsilon must be positive, got {format_rational(q)}")
        return q

    @field_validator("points", mode="before")
    @classmethod
    def _parse_points(cls, v: Any) -> List[Fraction]:
        return [_rational(p) for p in v]

    @field_serializer("epsilon")
    def _dump_epsilon(self, v: Fraction) -> str:
        return format_rational(v)

    @field_serializer("points")
    def _dump_points(self, v: List[Fraction]) -> List[str]:
        return [format_rational(p) for p in v]


def _rational(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    try:
        return parse_rational(str(v))
    except MalformedIntervalError as exc:
        raise ValueError(str(exc)) from exc


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


def load_settings() -> Dict[str, Any]:
    """Defaults read from the environment (and .env when present)."""
    load_dotenv(find_dotenv(usecwd=True))
    return {
        "seed": _env_int("WORKBENCH_SEED", 0),
        "horizon": _env_int("WORKBENCH_HORIZON", 64),
        "samples": _env_int("WORKBENCH_SAMPLES", 10000),
        "size_cap": _env_int("WORKBENCH_SIZE_CAP", 4),
        "output": os.getenv("WORKBENCH_OUTPUT", "text") or "text",
        "history_db": os.getenv("WORKBENCH_HISTORY_DB") or None,
    }


def build_config(overrides: Dict[str, Any]) -> RunConfig:
    """Merge CLI overrides (None means "not given") over the environment defaults."""
    values = load_settings()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = RunConfig(**values)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors())
        raise ConfigError(f"invalid configuration: {problems}") from exc
    logger.debug("Config loaded | %s", config.model_dump())
    return config
