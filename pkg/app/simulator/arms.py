"""
Per-arm replay state.
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import List

from app.curves import EnvelopePoint, FittedCurve, fallback_curve, fit_arctan
from app.traces.models import TraceEvent, TuningTrace

logger = logging.getLogger(__name__)


def reveal(trace: TuningTrace, t_from: float, t_to: float) -> List[TraceEvent]:
    """Events with t_from < t <= t_to, in order."""
    times = trace.times
    lo = bisect_right(times, t_from)
    hi = bisect_right(times, t_to)
    return list(trace.events[lo:hi])


@dataclass
class ArmState:
    """Runtime record of one arm: clock, revealed events, envelope and curve."""

    index: int
    trace: TuningTrace
    dt: float
    n_i: int = 0
    observations: List[TraceEvent] = field(default_factory=list)
    envelope: List[EnvelopePoint] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    interval_rewards: List[List[float]] = field(default_factory=list)
    curve: FittedCurve = field(default_factory=lambda: fallback_curve([]))
    curve_stale: bool = True

    @property
    def arm_id(self) -> str:
        return self.trace.arm_id

    @property
    def t_x(self) -> float:
        return self.n_i * self.dt

    @property
    def best(self) -> float:
        return self.envelope[-1].y if self.envelope else 0.0

    def pull(self) -> List[TraceEvent]:
        """Run the arm for one interval and absorb what it reveals."""
        t_from = self.t_x
        self.n_i += 1
        revealed = reveal(self.trace, t_from, self.t_x)
        self.observations.extend(revealed)

        top = self.envelope[-1].y if self.envelope else -math.inf
        for event in revealed:
            if event.accuracy > top:
                self.envelope.append(EnvelopePoint(x=event.t, y=event.accuracy))
                top = event.accuracy
                self.curve_stale = True

        # an interval without completed evaluations carries the best-so-far forward
        interval = [e.accuracy for e in revealed] or [self.best]
        self.interval_rewards.append(interval)
        self.rewards.extend(interval)
        return revealed

    def refit(self) -> FittedCurve:
        """Refit the curve if the envelope changed since the last fit."""
        if self.curve_stale:
            self.curve = fit_arctan(self.envelope)
            self.curve_stale = False
            logger.debug(
                f"Arm {self.arm_id}: fit on {self.curve.n_points} points, "
                f"fallback={self.curve.fallback}, rms={self.curve.residual:.3g}"
            )
        return self.curve
