"""
Run configuration and result models for the replay simulator.
"""

import json
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from app.policies.base import PolicySpec


class OverheadMode(str, Enum):
    NONE = "none"
    FIXED = "fixed"
    MEASURED = "measured"


class OverheadModel(BaseModel):
    """How bandit computation time is charged against the budget."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    mode: OverheadMode = Field(default=OverheadMode.NONE)
    seconds: float = Field(default=0.0, ge=0.0, description="Per-iteration charge in fixed mode")


class RunConfig(BaseModel):
    """One replay run: budget B, interval dt, policy and seed."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    budget: float = Field(..., gt=0.0, description="Total budget B in seconds")
    dt: float = Field(..., gt=0.0, description="Interval length in seconds")
    policy: PolicySpec
    overhead: OverheadModel = Field(default_factory=OverheadModel)
    seed: int = Field(default=0, ge=0, lt=2**64)
    keep_curve_snapshots: bool = Field(default=True)

    @model_validator(mode="after")
    def _interval_fits(self) -> "RunConfig":
        if self.dt > self.budget:
            raise ValueError(f"dt={self.dt} exceeds budget={self.budget}")
        return self


class DecisionRecord(BaseModel):
    """One pull. Forced arms score +inf, written as null in JSON."""

    iteration: int
    arm: int
    arm_id: str
    rationale: str
    b_rem: float
    scores: List[float]

    @field_validator("scores", mode="before")
    @classmethod
    def _restore_forced(cls, value):
        if isinstance(value, (list, tuple)):
            return [math.inf if v is None else v for v in value]
        return value

    @field_serializer("scores")
    def _null_forced(self, scores: List[float]) -> List[Optional[float]]:
        return [None if math.isinf(v) else v for v in scores]


class ArmCurveState(BaseModel):
    arm_id: str
    a: float
    b: float
    c: float
    d: float
    n_points: int
    residual: float
    fallback: bool
    level: float
    predicted: float


class CurveSnapshot(BaseModel):
    iteration: int
    b_rem: float
    arms: List[ArmCurveState]


class RunResult(BaseModel):
    """Outcome of one replay run."""

    dataset_id: str
    policy_name: str
    budget: float
    dt: float
    seed: int
    best_accuracy: float = Field(..., ge=0.0, le=1.0)
    allocations: Dict[str, float]
    pulls: Dict[str, int]
    overhead: float = Field(..., ge=0.0)
    iterations: int
    decisions: List[DecisionRecord] = Field(default_factory=list)
    curves: List[CurveSnapshot] = Field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        return cls.model_validate(json.loads(text))

    @property
    def cell(self) -> tuple:
        return (self.dataset_id, self.budget, self.seed, self.policy_name)
