"""
Ranking, confidence intervals and report files.
"""

import csv
import math

import numpy as np
import pytest

from app.analysis import (
    RankRow,
    RankTable,
    all_cis,
    best_per_family,
    boxplot_stats,
    budget_cis,
    emit_report,
    mean_rank_ci,
    rank_distribution,
    rank_runs,
    restrict,
    summary_text,
)
from app.core.errors import DataError, IncompleteGroupError
from app.simulator import RunResult


def result(policy, accuracy, dataset="d1", budget=300.0, seed=0):
    return RunResult(
        dataset_id=dataset,
        policy_name=policy,
        budget=budget,
        dt=10.0,
        seed=seed,
        best_accuracy=accuracy,
        allocations={},
        pulls={},
        overhead=0.0,
        iterations=0,
    )


def table_of(policy, ranks, budget=300.0):
    return RankTable(
        rows=tuple(
            RankRow(policy=policy, dataset_id=f"d{i}", budget=budget, seed=0, best_accuracy=0.5, rank=r)
            for i, r in enumerate(ranks)
        )
    )


def fixture_results(n_policies=3, budgets=(300.0, 900.0), n_datasets=4, seed=0):
    rng = np.random.default_rng(seed)
    policies = ["MasterLC-UCB-0.05", "RoundRobin", "UCB"][:n_policies]
    return [
        result(policy, float(np.round(rng.random(), 3)), dataset=f"d{d}", budget=budget)
        for budget in budgets
        for d in range(n_datasets)
        for policy in policies
    ]


class TestRankRuns:
    def test_strict_order(self):
        table = rank_runs([result("a", 0.9), result("b", 0.8), result("c", 0.7)])
        assert [(r.policy, r.rank) for r in table.rows] == [("a", 1.0), ("b", 2.0), ("c", 3.0)]

    def test_ties_share_average_rank(self):
        table = rank_runs([result("a", 0.9), result("b", 0.9), result("c", 0.7)])
        assert [r.rank for r in table.rows] == [1.5, 1.5, 3.0]

    def test_rank_sums(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n_policies = int(rng.integers(2, 8))
            results = [
                result(f"p{p}", float(np.round(rng.random(), 1)), dataset=f"d{d}", seed=s)
                for d in range(3)
                for s in range(2)
                for p in range(n_policies)
            ]
            table = rank_runs(results)
            for cell in table.cells:
                assert sum(table.cell_ranks(cell).values()) == pytest.approx(n_policies * (n_policies + 1) / 2)

    def test_invariant_under_monotone_transform(self):
        results = fixture_results()
        squashed = [r.model_copy(update={"best_accuracy": math.sqrt(r.best_accuracy) ** 3}) for r in results]
        assert [r.rank for r in rank_runs(results).rows] == [r.rank for r in rank_runs(squashed).rows]

    def test_cells_are_separate(self):
        table = rank_runs([result("a", 0.9, seed=0), result("b", 0.8, seed=0), result("a", 0.1, seed=1), result("b", 0.8, seed=1)])
        assert table.ranks("a") == [1.0, 2.0]
        assert table.cells == [("d1", 300.0, 0), ("d1", 300.0, 1)]

    def test_missing_policy(self):
        results = [result("a", 0.9, dataset="d1"), result("b", 0.8, dataset="d1"), result("a", 0.5, dataset="d2")]
        with pytest.raises(IncompleteGroupError) as exc:
            rank_runs(results)
        assert exc.value.missing == [("d2", 300.0, 0, "b")]

    def test_explicit_policy_list(self):
        with pytest.raises(IncompleteGroupError):
            rank_runs([result("a", 0.9)], policies=["a", "b"])

    def test_duplicate_result(self):
        with pytest.raises(DataError):
            rank_runs([result("a", 0.9), result("a", 0.8)])


class TestMeanRankCI:
    def test_zero_variance(self):
        ci = mean_rank_ci(table_of("p", [2.0] * 100), "p")
        assert (ci.ci_low, ci.mean_rank, ci.ci_high) == (2.0, 2.0, 2.0)

    def test_two_valued_ranks(self):
        ci = mean_rank_ci(table_of("p", [1.0, 3.0] * 50), "p")
        assert ci.n_runs == 100
        assert ci.mean_rank == pytest.approx(2.0)
        assert ci.ci_low == pytest.approx(1.803, abs=1e-3)
        assert ci.ci_high == pytest.approx(2.197, abs=1e-3)

    def test_width_shrinks_with_square_root(self):
        pattern = [1.0, 2.0, 3.0, 3.0, 4.0]
        small = mean_rank_ci(table_of("p", pattern * 10), "p")
        large = mean_rank_ci(table_of("p", pattern * 40), "p")
        assert small.half_width / large.half_width == pytest.approx(2.0, rel=0.05)

    def test_needs_two_runs(self):
        with pytest.raises(DataError):
            mean_rank_ci(table_of("p", [1.0]), "p")

    def test_all_cis_skips_single_runs(self):
        table = RankTable(rows=table_of("a", [1.0, 2.0]).rows + table_of("b", [2.0]).rows)
        assert [ci.policy for ci in all_cis(table)] == ["a"]

    def test_budget_cis(self):
        table = rank_runs(fixture_results())
        cis = budget_cis(table)
        assert len(cis) == 6
        assert all(ci.n_runs == 4 for ci in cis)

    def test_overlap(self):
        low = mean_rank_ci(table_of("a", [1.0, 1.2] * 20), "a")
        high = mean_rank_ci(table_of("b", [2.8, 3.0] * 20), "b")
        assert not low.overlaps(high)
        assert low.overlaps(low)


class TestBoxplot:
    def test_quartiles(self):
        stats = boxplot_stats(table_of("p", [4.0, 1.0, 3.0, 2.0]), "p", 300.0)
        assert (stats.q1, stats.median, stats.q3) == (1.75, 2.5, 3.25)
        assert (stats.whisker_low, stats.whisker_high) == (1.0, 4.0)
        assert stats.outliers == ()
        assert stats.ranks == (1.0, 2.0, 3.0, 4.0)

    def test_outliers(self):
        stats = boxplot_stats(table_of("p", [1.0, 1.0, 1.0, 1.0, 5.0]), "p", 300.0)
        assert stats.outliers == (5.0,)
        assert stats.whisker_high == 1.0

    def test_unknown_budget(self):
        with pytest.raises(DataError):
            boxplot_stats(table_of("p", [1.0]), "p", 900.0)

    def test_distribution_covers_every_policy_and_budget(self):
        table = rank_runs(fixture_results())
        assert len(rank_distribution(table)) == 6


def test_best_per_family():
    results = []
    for d, accs in enumerate([(0.9, 0.7, 0.8, 0.6), (0.8, 0.7, 0.9, 0.6)]):
        for policy, acc in zip(["MasterLC-0.1-0.1", "MasterLC-0.2-0.1", "MasterLC-UCB-0.05", "RoundRobin"], accs):
            results.append(result(policy, acc, dataset=f"d{d}"))
    winners = best_per_family(rank_runs(results))
    assert winners == {"MasterLC": "MasterLC-0.1-0.1", "MasterLC-UCB": "MasterLC-UCB-0.05", "RoundRobin": "RoundRobin"}

    shortlist = restrict(results, winners.values())
    assert {r.policy_name for r in shortlist} == set(winners.values())
    assert rank_runs(shortlist).policies == sorted(winners.values())


class TestReport:
    def test_empty_table_writes_headers(self, tmp_path):
        emit_report(RankTable(), [], tmp_path)
        assert (tmp_path / "ranks.csv").read_text() == "policy,dataset_id,budget_s,best_accuracy,rank,seed\n"
        assert (tmp_path / "cis.csv").read_text() == "policy,n_runs,mean_rank,ci_low,ci_high\n"
        assert (tmp_path / "summary.txt").exists()

    def test_cardinality(self, tmp_path):
        table = rank_runs(fixture_results())
        cis = all_cis(table)
        emit_report(table, cis, tmp_path)

        with open(tmp_path / "ranks.csv", newline="") as f:
            ranks = list(csv.DictReader(f))
        with open(tmp_path / "cis.csv", newline="") as f:
            ci_rows = list(csv.DictReader(f))
        assert len(ranks) == 24
        assert len(ci_rows) == 3
        assert all(row["n_runs"] == "8" for row in ci_rows)

    def test_reemit_is_byte_identical(self, tmp_path):
        table = rank_runs(fixture_results(seed=5))
        cis = all_cis(table)
        first = emit_report(table, cis, tmp_path / "a")
        second = emit_report(table, cis, tmp_path / "b")
        for a, b in zip(first, second):
            assert a.name == b.name
            assert a.read_bytes() == b.read_bytes()

    def test_summary_lists_best_policy_first(self):
        results = [result("good", 0.9, dataset=f"d{d}") for d in range(3)]
        results += [result("bad", 0.1, dataset=f"d{d}") for d in range(3)]
        table = rank_runs(results)
        text = summary_text(table, all_cis(table))
        assert text.index("good") < text.index("bad")
