"""
Learning-curve extrapolating bandit rules.

All three variants decide on the vector of predicted end-of-budget rewards r.
"""

import math

import numpy as np

from app.policies.base import (
    BanditView,
    Decision,
    Policy,
    PolicySpec,
    Rationale,
    greedy_arm,
    ranked_arms,
)


def choose_v1(view: BanditView, eps1: float, eps2: float, rng: np.random.Generator) -> Decision:
    """Double epsilon-greedy: runner-up with eps1, random arm with eps2, else argmax(r)."""
    r = view.predicted
    order = ranked_arms(r)
    if view.n_arms == 1:
        return Decision(arm=0, rationale=Rationale.GREEDY, scores=r)

    u = rng.random()
    if u < eps1:
        return Decision(arm=order[1], rationale=Rationale.RUNNER_UP, scores=r)
    if u < eps1 + eps2:
        return Decision(arm=int(rng.integers(view.n_arms)), rationale=Rationale.RANDOM, scores=r)
    return Decision(arm=order[0], rationale=Rationale.GREEDY, scores=r)


def decay_epsilon(view: BanditView) -> float:
    """Exploration probability falling linearly from 1 at the start to 0 at B."""
    if view.budget <= 0:
        return 0.0
    return max(0.0, 1.0 - view.elapsed / view.budget)


def choose_v2(view: BanditView, rng: np.random.Generator) -> Decision:
    """Epsilon-greedy on r with a linearly decaying epsilon."""
    r = view.predicted
    if view.n_arms == 1:
        return Decision(arm=0, rationale=Rationale.GREEDY, scores=r)

    if rng.random() < decay_epsilon(view):
        return Decision(arm=int(rng.integers(view.n_arms)), rationale=Rationale.RANDOM, scores=r)
    return Decision(arm=greedy_arm(r), rationale=Rationale.GREEDY, scores=r)


def ucb_bonus(r: float, n: int, n_i: int, rho: float) -> float:
    """r + rho * sqrt(2 ln n / ln n_i).

    The denominator is the log of the pull count. An arm pulled at most once
    has ln n_i <= 0 and gets +inf so it is pulled next; rho = 0 returns r.
    """
    if rho == 0:
        return r
    if n_i <= 1:
        return math.inf
    return r + rho * math.sqrt(2.0 * math.log(max(n, 1)) / math.log(n_i))


def choose_v3(view: BanditView, rho: float) -> Decision:
    """argmax of r plus the scaled exploration bonus."""
    n = view.iteration
    scores = tuple(ucb_bonus(r, n, n_i, rho) for r, n_i in zip(view.predicted, view.pulls))
    rationale = Rationale.GREEDY if rho == 0 else Rationale.UCB_BONUS
    return Decision(arm=greedy_arm(scores), rationale=rationale, scores=scores)


class MasterLCPolicy(Policy):
    uses_curves = True

    def __init__(self, spec: PolicySpec):
        super().__init__(spec)
        self.eps1 = spec.eps1
        self.eps2 = spec.eps2

    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_v1(view, self.eps1, self.eps2, rng)


class MasterLCDecayPolicy(Policy):
    uses_curves = True

    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_v2(view, rng)


class MasterLCUCBPolicy(Policy):
    uses_curves = True

    def __init__(self, spec: PolicySpec):
        super().__init__(spec)
        self.rho = spec.rho

    def choose(self, view: BanditView, rng: np.random.Generator) -> Decision:
        return choose_v3(view, self.rho)
