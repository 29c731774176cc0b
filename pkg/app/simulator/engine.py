"""
Trace replay of the bandit loop.

Round Robin initialization gives every arm one interval, then each iteration
asks the policy for an arm, runs it for dt, refits the learning curves,
recomputes the extrapolated rewards and charges overhead against the budget.
Time is simulated from trace timestamps, so runs are reproducible.
"""

import logging
import time
from typing import Callable, List, Optional, Sequence

import numpy as np

from app.core.errors import ConfigError, TraceMismatchError
from app.curves import extrapolate_reward
from app.policies import BanditView, Decision, Policy, Rationale, build_policy
from app.simulator.arms import ArmState
from app.simulator.models import (
    ArmCurveState,
    CurveSnapshot,
    DecisionRecord,
    OverheadMode,
    RunConfig,
    RunResult,
)
from app.traces.models import TuningTrace

logger = logging.getLogger(__name__)

Clock = Callable[[], float]
Observer = Callable[["ReplaySimulator"], None]


def charge_overhead(config: RunConfig, measured: float) -> float:
    """Seconds of bandit computation to subtract from the remaining budget."""
    mode = config.overhead.mode
    if mode is OverheadMode.NONE:
        return 0.0
    if mode is OverheadMode.FIXED:
        return config.overhead.seconds
    return max(0.0, measured)


class ReplaySimulator:
    """Replays one dataset's traces under one policy and budget."""

    def __init__(
        self,
        traces: Sequence[TuningTrace],
        config: RunConfig,
        policy: Optional[Policy] = None,
        clock: Clock = time.perf_counter,
        observer: Optional[Observer] = None,
    ):
        self._validate(traces, config)
        self.config = config
        self.dataset_id = traces[0].dataset_id
        self.policy = policy or build_policy(config.policy)
        self.clock = clock
        self.observer = observer
        self.rng = np.random.default_rng(config.seed)
        self.arms = [ArmState(index=i, trace=trace, dt=config.dt) for i, trace in enumerate(traces)]
        self.predicted: List[float] = [0.0] * len(self.arms)
        self.overhead_total = 0.0
        self.iteration = 0
        self.decisions: List[DecisionRecord] = []
        self.snapshots: List[CurveSnapshot] = []

    @staticmethod
    def _validate(traces: Sequence[TuningTrace], config: RunConfig) -> None:
        if not traces:
            raise TraceMismatchError("no traces given: a run needs at least one arm")
        datasets = {t.dataset_id for t in traces}
        if len(datasets) != 1:
            raise TraceMismatchError(f"traces span several datasets: {sorted(datasets)}")
        arm_ids = [t.arm_id for t in traces]
        if len(set(arm_ids)) != len(arm_ids):
            raise TraceMismatchError(f"duplicate arm ids in dataset {traces[0].dataset_id!r}: {arm_ids}")
        needed = config.dt * len(traces)
        if config.budget < needed:
            raise ConfigError(
                f"budget {config.budget:g}s cannot fit the initialization phase "
                f"({len(traces)} arms x dt {config.dt:g}s = {needed:g}s)"
            )

    @property
    def spent(self) -> float:
        return sum(arm.t_x for arm in self.arms) + self.overhead_total

    @property
    def b_rem(self) -> float:
        return self.config.budget - self.spent

    def view(self) -> BanditView:
        return BanditView(
            predicted=tuple(self.predicted),
            pulls=tuple(arm.n_i for arm in self.arms),
            rewards=tuple(tuple(arm.rewards) for arm in self.arms),
            best_so_far=tuple(arm.best for arm in self.arms),
            budget=self.config.budget,
            b_rem=self.b_rem,
            dt=self.config.dt,
        )

    def _pull(self, decision: Decision) -> None:
        arm = self.arms[decision.arm]
        self.decisions.append(
            DecisionRecord(
                iteration=self.iteration,
                arm=decision.arm,
                arm_id=arm.arm_id,
                rationale=decision.rationale.value,
                b_rem=self.b_rem,
                scores=list(decision.scores),
            )
        )
        arm.pull()
        self.iteration += 1

    def _initialize(self) -> None:
        """Round Robin pass giving every arm one interval."""
        for i in range(len(self.arms)):
            scores = tuple(-float(arm.n_i) for arm in self.arms)
            self._pull(Decision(arm=i, rationale=Rationale.ROUND_ROBIN, scores=scores))

    def _refit(self, b_rem: float) -> None:
        for i, arm in enumerate(self.arms):
            curve = arm.refit()
            self.predicted[i] = extrapolate_reward(curve, arm.t_x, b_rem)

        if self.config.keep_curve_snapshots:
            self.snapshots.append(
                CurveSnapshot(
                    iteration=self.iteration,
                    b_rem=b_rem,
                    arms=[
                        ArmCurveState(arm_id=arm.arm_id, predicted=r, **arm.curve.snapshot())
                        for arm, r in zip(self.arms, self.predicted)
                    ],
                )
            )

    def run(self) -> RunResult:
        """Execute the loop until the remaining budget is exhausted."""
        first = True
        while self.b_rem > 0:
            b_rem = self.b_rem
            started = self.clock()
            if first:
                self._initialize()
                first = False
            else:
                decision = self.policy.choose(self.view(), self.rng)
                self._pull(decision)
                logger.debug(
                    f"[{self.dataset_id}/{self.policy.name}] iteration {self.iteration}: "
                    f"arm {decision.arm} ({decision.rationale.value}), B_rem={b_rem:.1f}"
                )

            if self.policy.uses_curves:
                self._refit(b_rem)

            measured = self.clock() - started
            # overhead never pushes the run past the budget on its own
            headroom = max(0.0, self.b_rem)
            self.overhead_total += min(charge_overhead(self.config, measured), headroom)

            if self.observer is not None:
                self.observer(self)

        result = self.result()
        logger.debug(
            f"Run finished: dataset={self.dataset_id}, policy={self.policy.name}, "
            f"B={self.config.budget:g}, best={result.best_accuracy:.4f}, iterations={self.iteration}"
        )
        return result

    def result(self) -> RunResult:
        return RunResult(
            dataset_id=self.dataset_id,
            policy_name=self.policy.name,
            budget=self.config.budget,
            dt=self.config.dt,
            seed=self.config.seed,
            best_accuracy=max(arm.best for arm in self.arms),
            allocations={arm.arm_id: arm.t_x for arm in self.arms},
            pulls={arm.arm_id: arm.n_i for arm in self.arms},
            overhead=self.overhead_total,
            iterations=self.iteration,
            decisions=self.decisions,
            curves=self.snapshots,
        )


def run(
    traces: Sequence[TuningTrace],
    config: RunConfig,
    policy: Optional[Policy] = None,
    clock: Clock = time.perf_counter,
    observer: Optional[Observer] = None,
) -> RunResult:
    """Replay ``traces`` (one dataset, one trace per arm) under ``config``."""
    return ReplaySimulator(traces, config, policy=policy, clock=clock, observer=observer).run()
