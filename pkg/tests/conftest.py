"""
Shared fixtures for the lcbandit test suite.
"""

from typing import Iterable, Sequence, Tuple

import pytest

from app.policies import BanditView
from app.traces import TraceEvent, TuningTrace


def make_trace(arm_id: str, points: Iterable[Tuple[float, float]], dataset_id: str = "d1") -> TuningTrace:
    """Trace from (t, accuracy) pairs."""
    events = tuple(TraceEvent(t=t, accuracy=y) for t, y in points)
    return TuningTrace(arm_id=arm_id, dataset_id=dataset_id, events=events)


def make_view(
    predicted: Sequence[float],
    pulls: Sequence[int] = None,
    rewards: Sequence[Sequence[float]] = None,
    budget: float = 100.0,
    b_rem: float = 50.0,
    dt: float = 1.0,
) -> BanditView:
    n = len(predicted)
    pulls = tuple(pulls) if pulls is not None else (1,) * n
    rewards = tuple(tuple(r) for r in rewards) if rewards is not None else tuple(() for _ in range(n))
    return BanditView(
        predicted=tuple(float(r) for r in predicted),
        pulls=pulls,
        rewards=rewards,
        best_so_far=tuple(max(r) if r else 0.0 for r in rewards),
        budget=budget,
        b_rem=b_rem,
        dt=dt,
    )


@pytest.fixture
def two_arm_traces():
    """Arm a rises early and stalls, arm b starts slow and overtakes."""
    return [
        make_trace("a", [(0.5, 0.50), (1.5, 0.60), (2.5, 0.62), (4.0, 0.63), (5.5, 0.64)]),
        make_trace("b", [(0.8, 0.20), (1.9, 0.40), (2.2, 0.35), (3.4, 0.70), (4.6, 0.80), (5.9, 0.90)]),
    ]


@pytest.fixture
def csv_traces(tmp_path):
    """Two datasets with three arms each, written as CSV."""
    path = tmp_path / "traces.csv"
    lines = ["dataset_id,arm_id,elapsed_seconds,accuracy"]
    for dataset in ("d1", "d2"):
        for arm in ("svm", "rf", "knn"):
            for i, t in enumerate((5.0, 12.0, 30.0)):
                lines.append(f"{dataset},{arm},{t},{0.5 + 0.1 * i}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
