"""
Baseline bandits: Round Robin, UCB1 and the BestK rules.

Baselines value arms from the per-interval rewards the simulator records,
never from fitted curves.
"""

import math
from typing import Literal, Sequence

import numpy as np

from app.policies.base import (
    BanditView,
    Decision,
    Policy,
    PolicySpec,
    Rationale,
    greedy_arm,
)

BestKMode = Literal["rewards", "velocity"]


def exploration_bonus(n: int, n_i: int) -> float:
    """Classic UCB1 term sqrt(2 ln n / n_i); unpulled arms are forced."""
    if n_i <= 0:
        return math.inf
    return math.sqrt(2.0 * math.log(max(n, 1)) / n_i)


def choose_round_robin(view: BanditView) -> Decision:
    """Least-pulled arm, lowest index first, which cycles through the arms."""
    scores = tuple(-float(n_i) for n_i in view.pulls)
    return Decision(arm=greedy_arm(scores), rationale=Rationale.ROUND_ROBIN, scores=scores)


def choose_ucb1(view: BanditView) -> Decision:
    """Mean observed reward plus sqrt(2 ln n / n_i)."""
    n = view.iteration
    scores = []
    for rewards, n_i in zip(view.rewards, view.pulls):
        if n_i <= 0 or not rewards:
            scores.append(math.inf)
            continue
        scores.append(float(np.mean(rewards)) + exploration_bonus(n, n_i))
    return Decision(arm=greedy_arm(scores), rationale=Rationale.UCB_BONUS, scores=tuple(scores))


def best_k_value(rewards: Sequence[float], k: int, mode: BestKMode) -> float:
    """Mean of the top-k rewards, or mean increment between them (velocity)."""
    if not rewards:
        return 0.0
    top = sorted(rewards, reverse=True)[:k]
    if mode == "rewards":
        return float(np.mean(top))
    if len(top) < 2:
        return 0.0
    return float(np.mean(np.diff(sorted(top))))


def choose_best_k(view: BanditView, k: int, mode: BestKMode) -> Decision:
    """BestK-Rewards / BestK-Velocity value plus the UCB1 exploration term."""
    n = view.iteration
    scores = []
    for rewards, n_i in zip(view.rewards, view.pulls):
        if n_i <= 0 or not rewards:
            scores.append(math.inf)
            continue
        scores.append(best_k_value(rewards, k, mode) + exploration_bonus(n, n_i))
    return Decision(arm=greedy_arm(scores), rationale=Rationale.UCB_BONUS, scores=tuple(scores))


class RoundRobinPolicy(Policy):
    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_round_robin(view)


class UCB1Policy(Policy):
    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_ucb1(view)


class BestKPolicy(Policy):
    def __init__(self, spec: PolicySpec, mode: BestKMode):
        super().__init__(spec)
        self.k = spec.k
        self.mode = mode

    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_best_k(view, self.k, self.mode)
