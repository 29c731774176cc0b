from app.policies.base import (
    BanditView,
    Decision,
    Policy,
    PolicyKind,
    PolicySpec,
    Rationale,
    canonical_kind,
    greedy_arm,
    policy_family,
    ranked_arms,
)
from app.policies.baselines import (
    BestKPolicy,
    RoundRobinPolicy,
    UCB1Policy,
    best_k_value,
    choose_best_k,
    choose_round_robin,
    choose_ucb1,
)
from app.policies.master_lc import (
    MasterLCPolicy,
    MasterLCDecayPolicy,
    MasterLCUCBPolicy,
    choose_v1,
    choose_v2,
    choose_v3,
    decay_epsilon,
    ucb_bonus,
)


def build_policy(spec: PolicySpec) -> Policy:
    """Instantiate the policy a spec describes."""
    if spec.kind is PolicyKind.ROUND_ROBIN:
        return RoundRobinPolicy(spec)
    if spec.kind is PolicyKind.UCB1:
        return UCB1Policy(spec)
    if spec.kind is PolicyKind.BEST_K_REWARDS:
        return BestKPolicy(spec, "rewards")
    if spec.kind is PolicyKind.BEST_K_VELOCITY:
        return BestKPolicy(spec, "velocity")
    if spec.kind is PolicyKind.MASTER_LC:
        return MasterLCPolicy(spec)
    if spec.kind is PolicyKind.MASTER_LC_DECAY:
        return MasterLCDecayPolicy(spec)
    return MasterLCUCBPolicy(spec)


__all__ = [
    "BanditView",
    "BestKPolicy",
    "Decision",
    "MasterLCPolicy",
    "MasterLCDecayPolicy",
    "MasterLCUCBPolicy",
    "Policy",
    "PolicyKind",
    "PolicySpec",
    "Rationale",
    "canonical_kind",
    "RoundRobinPolicy",
    "UCB1Policy",
    "best_k_value",
    "build_policy",
    "choose_best_k",
    "choose_round_robin",
    "choose_ucb1",
    "choose_v1",
    "choose_v2",
    "choose_v3",
    "decay_epsilon",
    "greedy_arm",
    "policy_family",
    "ranked_arms",
    "ucb_bonus",
]
