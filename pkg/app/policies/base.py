"""
Shared policy types.
Policy configuration, the per-iteration view a policy decides on, and its decision.
"""

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PolicyKind(str, Enum):
    ROUND_ROBIN = "round_robin"
    UCB1 = "ucb1"
    BEST_K_REWARDS = "best_k_rewards"
    BEST_K_VELOCITY = "best_k_velocity"
    MASTER_LC = "master_lc"
    MASTER_LC_DECAY = "master_lc_decay"
    MASTER_LC_UCB = "master_lc_ucb"


# Kind names accepted in configs written for the variant-numbered naming
KIND_ALIASES = {
    "hamlet_v1": PolicyKind.MASTER_LC,
    "hamlet_v2": PolicyKind.MASTER_LC_DECAY,
    "hamlet_v3": PolicyKind.MASTER_LC_UCB,
}


def canonical_kind(value):
    """Map an accepted alias to its PolicyKind; anything else passes through."""
    if isinstance(value, str) and not isinstance(value, PolicyKind):
        return KIND_ALIASES.get(value.strip().lower(), value)
    return value


class Rationale(str, Enum):
    GREEDY = "greedy"
    RUNNER_UP = "runner_up"
    RANDOM = "random"
    UCB_BONUS = "ucb_bonus"
    ROUND_ROBIN = "round_robin"


def _fmt(value: float) -> str:
    return f"{value:g}"


class PolicySpec(BaseModel):
    """Which bandit to run and its parameters.

    Parameters that do not apply to ``kind`` are ignored.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    kind: PolicyKind = Field(..., description="Bandit rule")
    eps1: float = Field(default=0.1, ge=0.0, le=1.0, description="Runner-up probability (master_lc)")
    eps2: float = Field(default=0.1, ge=0.0, le=1.0, description="Random-arm probability (master_lc)")
    rho: float = Field(default=0.05, ge=0.0, description="Exploration bonus scale (master_lc_ucb)")
    k: int = Field(default=7, ge=1, description="Top-K window (best_k_*)")

    @field_validator("kind", mode="before")
    @classmethod
    def _alias_kind(cls, value):
        return canonical_kind(value)

    @model_validator(mode="after")
    def _probabilities_sum(self) -> "PolicySpec":
        if self.kind is PolicyKind.MASTER_LC and self.eps1 + self.eps2 > 1.0 + 1e-12:
            raise ValueError(f"eps1 + eps2 must be <= 1, got {self.eps1} + {self.eps2}")
        return self

    @property
    def name(self) -> str:
        """Output name, e.g. MasterLC-0.1-0.1, MasterLC-UCB-0.05, BestKReward-7."""
        if self.kind is PolicyKind.ROUND_ROBIN:
            return "RoundRobin"
        if self.kind is PolicyKind.UCB1:
            return "UCB"
        if self.kind is PolicyKind.BEST_K_REWARDS:
            return f"BestKReward-{self.k}"
        if self.kind is PolicyKind.BEST_K_VELOCITY:
            return f"BestKVelocity-{self.k}"
        if self.kind is PolicyKind.MASTER_LC:
            return f"MasterLC-{_fmt(self.eps1)}-{_fmt(self.eps2)}"
        if self.kind is PolicyKind.MASTER_LC_DECAY:
            return "MasterLCDecay"
        return f"MasterLC-UCB-{_fmt(self.rho)}"


_FAMILY_PATTERNS = (
    (re.compile(r"^MasterLC-UCB-[^-]+$"), "MasterLC-UCB"),
    (re.compile(r"^MasterLC-[^-]+-[^-]+$"), "MasterLC"),
    (re.compile(r"^BestKReward-\d+$"), "BestKReward"),
    (re.compile(r"^BestKVelocity-\d+$"), "BestKVelocity"),
)


def policy_family(name: str) -> str:
    """Map a concrete policy name to its parametrization family."""
    for pattern, family in _FAMILY_PATTERNS:
        if pattern.match(name):
            return family
    return name


@dataclass(frozen=True)
class BanditView:
    """What a policy may look at when choosing the next arm."""

    predicted: Tuple[float, ...]
    pulls: Tuple[int, ...]
    rewards: Tuple[Tuple[float, ...], ...]
    best_so_far: Tuple[float, ...]
    budget: float
    b_rem: float
    dt: float

    @property
    def n_arms(self) -> int:
        return len(self.pulls)

    @property
    def iteration(self) -> int:
        """Total pulls so far (n)."""
        return sum(self.pulls)

    @property
    def elapsed(self) -> float:
        return self.budget - self.b_rem


@dataclass(frozen=True)
class Decision:
    arm: int
    rationale: Rationale
    scores: Tuple[float, ...]


def greedy_arm(scores: Sequence[float]) -> int:
    """Index of the maximum, lowest index on ties."""
    return int(np.argmax(np.asarray(scores, dtype=float)))


def ranked_arms(scores: Sequence[float]) -> Tuple[int, ...]:
    """Arms by score descending, index ascending."""
    return tuple(sorted(range(len(scores)), key=lambda i: (-scores[i], i)))


class Policy(ABC):
    """Arm-selection rule advanced once per simulator iteration."""

    uses_curves: bool = False

    def __init__(self, spec: PolicySpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    @abstractmethod
    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        """Pick the next arm."""
