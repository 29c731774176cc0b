"""
Trace replay: interval accounting, budget conservation and determinism.
"""

import itertools
import json

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.errors import ConfigError, TraceMismatchError
from app.curves import monotone_envelope
from app.policies import Decision, Policy, PolicySpec, Rationale
from app.simulator import (
    OverheadModel,
    ReplaySimulator,
    RunConfig,
    RunResult,
    charge_overhead,
    reveal,
    run,
)
from app.traces import crossing_family, generate_traces, group_by_dataset
from tests.conftest import make_trace

POLICY_KINDS = ["round_robin", "ucb1", "best_k_rewards", "best_k_velocity", "master_lc", "master_lc_decay", "master_lc_ucb"]


class ScriptedPolicy(Policy):
    """Plays a fixed arm sequence after initialization."""

    def __init__(self, script):
        super().__init__(PolicySpec(kind="round_robin"))
        self.script = list(script)

    def choose(self, view, rng):
        arm = self.script.pop(0)
        return Decision(arm=arm, rationale=Rationale.GREEDY, scores=(0.0,) * view.n_arms)


def random_traces(rng, n_arms, horizon=200.0, dataset_id="d1"):
    traces = []
    for i in range(n_arms):
        n = int(rng.integers(1, 40))
        times = np.sort(rng.uniform(0.1, horizon, size=n))
        times = np.unique(np.round(times, 3))
        scores = np.round(rng.random(times.size), 3)
        traces.append(make_trace(f"arm{i}", zip(times.tolist(), scores.tolist()), dataset_id=dataset_id))
    return traces


def config(budget, dt=1.0, kind="round_robin", seed=0, overhead=None, **params):
    return RunConfig(
        budget=budget,
        dt=dt,
        policy=PolicySpec(kind=kind, **params),
        overhead=overhead or OverheadModel(),
        seed=seed,
    )


class TestReveal:
    def test_window_beyond_last_event(self):
        trace = make_trace("a", [(1.0, 0.2), (3.0, 0.4)])
        assert reveal(trace, 3.0, 10.0) == []

    def test_right_boundary_is_inclusive(self):
        trace = make_trace("a", [(5.0, 0.2), (10.0, 0.4)])
        assert [e.t for e in reveal(trace, 0.0, 10.0)] == [5.0, 10.0]
        assert [e.t for e in reveal(trace, 5.0, 10.0)] == [10.0]

    def test_partition_recovers_all_events(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            (trace,) = random_traces(rng, 1, horizon=50.0)
            cuts = np.sort(rng.uniform(0.0, 60.0, size=int(rng.integers(0, 12))))
            bounds = [0.0, *cuts.tolist(), 60.0]
            pieces = [e for lo, hi in zip(bounds, bounds[1:]) for e in reveal(trace, lo, hi)]
            assert pieces == list(trace.events)


def test_single_arm_is_pulled_for_the_whole_budget():
    trace = make_trace("only", [(3.0, 0.4), (12.0, 0.7), (55.0, 0.6), (99.0, 0.8), (120.0, 0.95)])
    result = run([trace], config(budget=100.0, dt=10.0, kind="master_lc_ucb", rho=0.05))
    assert result.pulls == {"only": 10}
    assert result.allocations == {"only": 100.0}
    assert result.best_accuracy == 0.8


def test_round_robin_splits_evenly():
    rng = np.random.default_rng(0)
    result = run(random_traces(rng, 5), config(budget=100.0, dt=1.0))
    assert result.pulls == {f"arm{i}": 20 for i in range(5)}
    assert result.iterations == 100


TWO_ARMS = [
    make_trace("a", [(0.5, 0.50), (1.5, 0.60), (2.5, 0.62), (4.0, 0.63)]),
    make_trace("b", [(0.8, 0.20), (1.9, 0.40), (3.4, 0.70), (4.6, 0.80)]),
]


class ScriptOnlySimulator(ReplaySimulator):
    """Leaves every interval, including the first ones, to the policy."""

    def _initialize(self):
        pass


def replayed_best(traces, pulls, dt):
    return max(
        max((e.accuracy for e in trace.events if e.t <= n * dt), default=0.0)
        for trace, n in zip(traces, pulls)
    )


def test_accounting_matches_brute_force_enumeration():
    dt = 1.0
    # six intervals: two for initialization, four chosen freely
    for script in itertools.product((0, 1), repeat=4):
        sim = ReplaySimulator(TWO_ARMS, config(budget=6 * dt, dt=dt), policy=ScriptedPolicy(script))
        result = sim.run()

        pulls = [1 + script.count(0), 1 + script.count(1)]
        assert result.pulls == {"a": pulls[0], "b": pulls[1]}
        assert result.best_accuracy == replayed_best(TWO_ARMS, pulls, dt)
        assert [d.arm for d in result.decisions] == [0, 1, *script]
        assert [d.b_rem for d in result.decisions] == [6.0, 5.0, 4.0, 3.0, 2.0, 1.0]

    greedy = run(TWO_ARMS, config(budget=6 * dt, dt=dt, kind="master_lc_ucb", rho=0.0))
    assert greedy.pulls["a"] + greedy.pulls["b"] == 6


def test_every_pull_sequence_matches_brute_force_replay():
    dt = 1.0
    sequences = list(itertools.product((0, 1), repeat=6))
    assert len(sequences) == 64
    for script in sequences:
        sim = ScriptOnlySimulator(TWO_ARMS, config(budget=6 * dt, dt=dt), policy=ScriptedPolicy(script))
        result = sim.run()

        pulls = [script.count(0), script.count(1)]
        assert result.pulls == {"a": pulls[0], "b": pulls[1]}
        assert result.allocations == {"a": pulls[0] * dt, "b": pulls[1] * dt}
        assert result.best_accuracy == replayed_best(TWO_ARMS, pulls, dt)
        assert [d.arm for d in result.decisions] == list(script)


def test_budget_conservation():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n_arms = int(rng.integers(1, 5))
        dt = float(rng.choice([0.5, 1.0, 2.5, 10.0]))
        budget = n_arms * dt + float(rng.uniform(0.0, 25.0)) * dt
        overhead = (
            OverheadModel(mode="fixed", seconds=float(rng.uniform(0.0, 1.0)))
            if rng.random() < 0.5
            else OverheadModel()
        )
        kind = str(rng.choice(POLICY_KINDS))
        cfg = config(budget=budget, dt=dt, kind=kind, seed=int(rng.integers(0, 1000)), overhead=overhead)
        result = run(random_traces(rng, n_arms, horizon=budget), cfg)

        spent = sum(result.allocations.values()) + result.overhead
        assert budget - dt < spent <= budget + dt
        assert all(n >= 1 for n in result.pulls.values())
        assert sum(result.pulls.values()) == result.iterations


@pytest.mark.parametrize("kind", ["master_lc", "master_lc_decay", "master_lc_ucb", "ucb1", "best_k_velocity"])
def test_runs_are_deterministic(kind):
    traces = generate_traces(crossing_family(n_datasets=1, horizon=400.0, seed=3))
    cfg = config(budget=300.0, dt=10.0, kind=kind, seed=17, overhead=OverheadModel(mode="fixed", seconds=0.5))
    assert run(traces, cfg).to_json() == run(traces, cfg).to_json()


def test_result_json_round_trip():
    traces = generate_traces(crossing_family(n_datasets=1, horizon=400.0, seed=3))
    result = run(traces, config(budget=200.0, dt=10.0, kind="master_lc_ucb", rho=0.05))
    # forced arms carry infinite scores in the decision log
    assert any(float("inf") in d.scores for d in result.decisions)
    text = result.to_json()
    assert "Infinity" not in text
    forced = json.loads(text)["decisions"][len(traces)]["scores"]
    assert None in forced
    assert RunResult.from_json(text) == result


class TestOverhead:
    def test_charge_modes(self):
        cfg = config(budget=10.0)
        assert charge_overhead(cfg, 0.3) == 0.0
        fixed = config(budget=10.0, overhead=OverheadModel(mode="fixed", seconds=0.05))
        assert charge_overhead(fixed, 0.3) == 0.05
        measured = config(budget=10.0, overhead=OverheadModel(mode="measured"))
        assert charge_overhead(measured, 0.3) == 0.3
        assert charge_overhead(measured, -1.0) == 0.0

    def test_fixed_overhead_accumulates(self):
        totals = []
        cfg = config(budget=1000.0, overhead=OverheadModel(mode="fixed", seconds=0.05))
        traces = [make_trace("a", [(1.0, 0.5)])]
        run(traces, cfg, observer=lambda sim: totals.append(sim.overhead_total))
        assert totals[99] == pytest.approx(5.0)

    def test_measured_overhead_uses_the_clock(self):
        ticks = itertools.count()
        totals = []
        cfg = config(budget=100.0, overhead=OverheadModel(mode="measured"))
        traces = [make_trace("a", [(1.0, 0.5)]), make_trace("b", [(2.0, 0.6)])]
        run(
            traces,
            cfg,
            clock=lambda: next(ticks) * 0.02,
            observer=lambda sim: totals.append(sim.overhead_total),
        )
        increments = np.diff([0.0, *totals])
        np.testing.assert_allclose(increments[:50], 0.02, atol=1e-9)

    def test_overhead_never_exceeds_remaining_budget(self):
        cfg = config(budget=10.0, overhead=OverheadModel(mode="fixed", seconds=3.0))
        result = run([make_trace("a", [(1.0, 0.5)])], cfg)
        assert sum(result.allocations.values()) + result.overhead == pytest.approx(10.0)


def test_envelope_tracks_revealed_events():
    traces = generate_traces(crossing_family(n_datasets=1, horizon=600.0, seed=11, noise=0.08))
    checked = []

    def observe(sim):
        for arm in sim.arms:
            assert arm.observations == reveal(arm.trace, 0.0, arm.t_x)
            assert arm.envelope == monotone_envelope(arm.observations)
        checked.append(sim.iteration)

    run(traces, config(budget=500.0, dt=10.0, kind="master_lc", seed=2), observer=observe)
    assert checked


def test_ucb_variant_pulls_every_arm_twice():
    traces = generate_traces(crossing_family(n_datasets=1, horizon=600.0, seed=4))
    result = run(traces, config(budget=200.0, dt=10.0, kind="master_lc_ucb", rho=0.05))
    assert all(n >= 2 for n in result.pulls.values())


def test_round_robin_score_grows_with_budget():
    traces = generate_traces(crossing_family(n_datasets=1, horizon=2000.0, seed=9, noise=0.05))
    scores = [run(traces, config(budget=b, dt=10.0)).best_accuracy for b in (30, 60, 150, 400, 900, 1500)]
    assert scores == sorted(scores)


def test_curve_snapshots_follow_every_iteration():
    traces = generate_traces(crossing_family(n_datasets=1, horizon=600.0, seed=5))
    result = run(traces, config(budget=100.0, dt=10.0, kind="master_lc_decay", seed=1))
    assert len(result.curves) == result.iterations - len(traces) + 1
    assert all(len(snap.arms) == len(traces) for snap in result.curves)

    baseline = run(traces, config(budget=100.0, dt=10.0, kind="ucb1"))
    assert baseline.curves == []


class TestValidation:
    def test_no_traces(self):
        with pytest.raises(TraceMismatchError):
            run([], config(budget=10.0))

    def test_mixed_datasets(self):
        traces = [make_trace("a", [(1.0, 0.5)], "d1"), make_trace("b", [(1.0, 0.5)], "d2")]
        with pytest.raises(TraceMismatchError):
            run(traces, config(budget=10.0))

    def test_duplicate_arms(self):
        traces = [make_trace("a", [(1.0, 0.5)]), make_trace("a", [(2.0, 0.5)])]
        with pytest.raises(TraceMismatchError):
            run(traces, config(budget=10.0))

    def test_budget_must_fit_initialization(self):
        rng = np.random.default_rng(1)
        with pytest.raises(ConfigError):
            run(random_traces(rng, 3), config(budget=20.0, dt=10.0))

    def test_interval_longer_than_budget(self):
        with pytest.raises(ValidationError):
            config(budget=5.0, dt=10.0)


def test_grouped_datasets_replay_independently():
    grouped = group_by_dataset(generate_traces(crossing_family(n_datasets=2, horizon=300.0, seed=1)))
    results = [run(traces, config(budget=90.0, dt=10.0)) for traces in grouped.values()]
    assert [r.dataset_id for r in results] == list(grouped)
