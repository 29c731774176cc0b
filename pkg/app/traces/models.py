"""
Trace data model.
Timestamped evaluation scores of one tuner arm, the replay ground truth.
"""

from enum import Enum
from functools import cached_property
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TraceEvent(BaseModel):
    """One completed evaluation: cumulative arm time and its test score."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    t: float = Field(..., ge=0.0, description="Cumulative arm execution time in seconds")
    accuracy: float = Field(..., ge=0.0, le=1.0, description="Test score in [0, 1]")


class TuningTrace(BaseModel):
    """All evaluations one arm produced on one dataset, ordered by time.

    Accuracies are raw scores and need not be monotone.
    """

    model_config = ConfigDict(frozen=True)

    arm_id: str = Field(..., min_length=1, description="Arm (tuner/base learner) identifier")
    dataset_id: str = Field(..., min_length=1, description="Dataset identifier")
    events: Tuple[TraceEvent, ...] = Field(default=(), description="Events sorted strictly by t")

    @field_validator("events")
    @classmethod
    def _strictly_ascending(cls, events: Tuple[TraceEvent, ...]) -> Tuple[TraceEvent, ...]:
        for prev, cur in zip(events, events[1:]):
            if cur.t <= prev.t:
                raise ValueError(
                    f"events must be strictly ascending in t (t={cur.t!r} follows t={prev.t!r})"
                )
        return events

    @cached_property
    def times(self) -> Tuple[float, ...]:
        return tuple(e.t for e in self.events)

    @cached_property
    def accuracies(self) -> Tuple[float, ...]:
        return tuple(e.accuracy for e in self.events)

    @property
    def last_t(self) -> float:
        return self.events[-1].t if self.events else 0.0


class CurveShape(str, Enum):
    EXPONENTIAL = "exponential"
    ARCTAN = "arctan"


class ArmCurve(BaseModel):
    """Ground-truth saturating curve of one synthetic arm.

    With s = max(0, t - delay):
      exponential: asymptote * (1 - exp(-rate * s))
      arctan:      asymptote * (2 / pi) * arctan(rate * s)
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    asymptote: float = Field(..., ge=0.0, le=1.0)
    rate: float = Field(..., gt=0.0)
    delay: float = Field(default=0.0, ge=0.0)
    shape: CurveShape = Field(default=CurveShape.EXPONENTIAL)


class SyntheticSpec(BaseModel):
    """Recipe for reproducible artificial traces."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    n_arms: int = Field(..., ge=1, description="Number of arms per dataset")
    horizon: float = Field(..., gt=0.0, description="Seconds of arm time covered by each trace")
    arms: List[ArmCurve] = Field(..., min_length=1, description="Ground truth per arm")
    mean_gap: float = Field(..., gt=0.0, description="Mean seconds between evaluation completions")
    noise: float = Field(default=0.0, ge=0.0, description="Scale of the half-normal score shortfall")
    seed: int = Field(default=0, ge=0, lt=2**64)
    n_datasets: int = Field(default=1, ge=1, description="Independent replicas of the arm family")
    dataset_prefix: str = Field(default="synthetic", min_length=1)

    @model_validator(mode="after")
    def _arm_count_matches(self) -> "SyntheticSpec":
        if len(self.arms) != self.n_arms:
            raise ValueError(f"n_arms={self.n_arms} but {len(self.arms)} arm curves given")
        return self
