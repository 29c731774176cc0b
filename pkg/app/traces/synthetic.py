"""
Synthetic trace generator.
Produces reproducible artificial tuning traces from saturating ground-truth curves.
"""

import logging
import math
from typing import List

import numpy as np

from app.traces.models import ArmCurve, CurveShape, SyntheticSpec, TraceEvent, TuningTrace

logger = logging.getLogger(__name__)


def ground_truth(curve: ArmCurve, t: np.ndarray) -> np.ndarray:
    """Noise-free score of ``curve`` at arm times ``t``."""
    active = np.maximum(0.0, np.asarray(t, dtype=float) - curve.delay)
    if curve.shape is CurveShape.ARCTAN:
        return curve.asymptote * (2.0 / math.pi) * np.arctan(curve.rate * active)
    return curve.asymptote * (1.0 - np.exp(-curve.rate * active))


def _arrival_times(rng: np.random.Generator, mean_gap: float, horizon: float) -> np.ndarray:
    expected = int(horizon / mean_gap) + 1
    times = np.cumsum(rng.exponential(mean_gap, size=expected + 4 * math.isqrt(expected) + 8))
    while times[-1] <= horizon:
        more = np.cumsum(rng.exponential(mean_gap, size=expected + 8)) + times[-1]
        times = np.concatenate([times, more])
    times = times[times <= horizon]
    # an exponential draw of exactly 0 would duplicate a timestamp
    if times.size > 1:
        times = times[np.concatenate([[True], np.diff(times) > 0])]
    return times


def _arm_trace(
    rng: np.random.Generator, spec: SyntheticSpec, curve: ArmCurve, dataset_id: str, arm_id: str
) -> TuningTrace:
    times = _arrival_times(rng, spec.mean_gap, spec.horizon)
    shortfall = spec.noise * np.abs(rng.standard_normal(times.size))
    scores = np.clip(ground_truth(curve, times) - shortfall, 0.0, 1.0)
    events = tuple(TraceEvent(t=float(t), accuracy=float(y)) for t, y in zip(times, scores))
    return TuningTrace(arm_id=arm_id, dataset_id=dataset_id, events=events)


def generate_traces(spec: SyntheticSpec) -> List[TuningTrace]:
    """Generate traces for every dataset replica and arm of ``spec``.

    Pure function of ``spec``: dataset ``j`` draws from the ``j``-th child of
    ``SeedSequence(spec.seed)`` and arms consume that stream in index order.
    Every score lies on or below its arm's ground-truth curve.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.n_datasets)
    traces: List[TuningTrace] = []
    for j, child in enumerate(children):
        rng = np.random.default_rng(child)
        dataset_id = spec.dataset_prefix if spec.n_datasets == 1 else f"{spec.dataset_prefix}-{j:03d}"
        for i, curve in enumerate(spec.arms):
            traces.append(_arm_trace(rng, spec, curve, dataset_id, f"arm{i}"))

    logger.debug(
        f"Generated {len(traces)} synthetic traces "
        f"({spec.n_datasets} datasets x {spec.n_arms} arms, seed={spec.seed})"
    )
    return traces


def crossing_family(
    n_datasets: int,
    horizon: float,
    seed: int = 0,
    mean_gap: float = 2.0,
    noise: float = 0.0,
    crossing_fraction: float = 0.2,
) -> SyntheticSpec:
    """Three-arm family whose best arm at the horizon trails early on.

    arm0 saturates fast at 0.80, arm1 is weak (0.55), arm2 rises slowly
    towards 0.95 and overtakes arm0 at ``crossing_fraction * horizon``.
    All three follow arctan-shaped ground truth, so arm2 keeps a visible
    slope from its first interval onwards. Scores are noiseless unless
    ``noise`` is given.
    """
    fast_rate = 180.0 / horizon
    fast = ArmCurve(asymptote=0.80, rate=fast_rate, shape=CurveShape.ARCTAN)
    weak = ArmCurve(asymptote=0.55, rate=fast_rate, shape=CurveShape.ARCTAN)
    t_cross = crossing_fraction * horizon
    level = float(ground_truth(fast, np.array([t_cross]))[0])
    slow_rate = math.tan(level / 0.95 * math.pi / 2.0) / t_cross
    slow = ArmCurve(asymptote=0.95, rate=slow_rate, shape=CurveShape.ARCTAN)
    return SyntheticSpec(
        n_arms=3,
        horizon=horizon,
        arms=[fast, weak, slow],
        mean_gap=mean_gap,
        noise=noise,
        seed=seed,
        n_datasets=n_datasets,
        dataset_prefix="crossing",
    )
