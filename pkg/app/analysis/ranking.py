"""
Policy rankings and mean-rank confidence intervals.

Runs are grouped into cells keyed by (dataset_id, budget, seed). Within a
cell every policy gets the rank of its best accuracy, 1 being best and tied
accuracies sharing the average of the ranks they span.
"""

import logging
import math
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import rankdata

from app.core.errors import DataError, IncompleteGroupError
from app.policies import policy_family
from app.simulator.models import RunResult

logger = logging.getLogger(__name__)

Z_95 = 1.96

Cell = Tuple[str, float, int]


class RankRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    policy: str
    dataset_id: str
    budget: float
    seed: int
    best_accuracy: float
    rank: float

    @property
    def cell(self) -> Cell:
        return (self.dataset_id, self.budget, self.seed)


class RankTable(BaseModel):
    """Per-cell ranks of every policy, sorted by (policy, dataset, budget, seed)."""

    model_config = ConfigDict(frozen=True)

    rows: Tuple[RankRow, ...] = ()

    @property
    def policies(self) -> List[str]:
        return sorted({row.policy for row in self.rows})

    @property
    def budgets(self) -> List[float]:
        return sorted({row.budget for row in self.rows})

    @property
    def cells(self) -> List[Cell]:
        return sorted({row.cell for row in self.rows})

    def ranks(self, policy: str, budget: Optional[float] = None) -> List[float]:
        """Rank samples of one policy, optionally restricted to one budget."""
        return [
            row.rank
            for row in self.rows
            if row.policy == policy and (budget is None or row.budget == budget)
        ]

    def cell_ranks(self, cell: Cell) -> Dict[str, float]:
        return {row.policy: row.rank for row in self.rows if row.cell == cell}


class MeanRankCI(BaseModel):
    """95% normal-approximation interval on a policy's mean rank."""

    model_config = ConfigDict(frozen=True)

    policy: str
    n_runs: int = Field(..., ge=2)
    mean_rank: float
    ci_low: float
    ci_high: float
    budget: Optional[float] = None

    @property
    def half_width(self) -> float:
        return self.mean_rank - self.ci_low

    def overlaps(self, other: "MeanRankCI") -> bool:
        return self.ci_low <= other.ci_high and other.ci_low <= self.ci_high


class BoxStats(BaseModel):
    """Plot-ready rank distribution of one policy at one budget."""

    model_config = ConfigDict(frozen=True)

    policy: str
    budget: float
    n: int
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: Tuple[float, ...]
    ranks: Tuple[float, ...]


def rank_runs(results: Iterable[RunResult], policies: Optional[Sequence[str]] = None) -> RankTable:
    """Rank policies by best accuracy inside every (dataset, budget, seed) cell.

    ``policies`` defaults to every policy seen in ``results``; each cell must
    hold exactly one result per policy.
    """
    by_cell: Dict[Cell, Dict[str, RunResult]] = defaultdict(dict)
    for result in results:
        cell = (result.dataset_id, result.budget, result.seed)
        if result.policy_name in by_cell[cell]:
            raise DataError(
                f"duplicate result for policy {result.policy_name!r} in cell "
                f"(dataset={cell[0]}, budget={cell[1]:g}, seed={cell[2]})"
            )
        by_cell[cell][result.policy_name] = result

    compared = sorted(set(policies) if policies is not None else {p for runs in by_cell.values() for p in runs})

    missing = [
        (cell[0], cell[1], cell[2], policy)
        for cell, runs in by_cell.items()
        for policy in compared
        if policy not in runs
    ]
    if missing:
        logger.warning(f"{len(missing)} (cell, policy) combinations have no result")
        raise IncompleteGroupError(missing)

    rows: List[RankRow] = []
    for cell in sorted(by_cell):
        runs = by_cell[cell]
        accuracies = np.array([runs[p].best_accuracy for p in compared], dtype=float)
        ranks = rankdata(-accuracies, method="average")
        for policy, accuracy, rank in zip(compared, accuracies, ranks):
            rows.append(
                RankRow(
                    policy=policy,
                    dataset_id=cell[0],
                    budget=cell[1],
                    seed=cell[2],
                    best_accuracy=float(accuracy),
                    rank=float(rank),
                )
            )

    rows.sort(key=lambda r: (r.policy, r.dataset_id, r.budget, r.seed))
    logger.info(f"Ranked {len(compared)} policies over {len(by_cell)} cells")
    return RankTable(rows=tuple(rows))


def mean_rank_ci(table: RankTable, policy: str, budget: Optional[float] = None) -> MeanRankCI:
    """mean ± 1.96·s/√n over the policy's rank samples (s with ddof=1)."""
    samples = np.asarray(table.ranks(policy, budget), dtype=float)
    n = len(samples)
    if n < 2:
        scope = f" at budget {budget:g}" if budget is not None else ""
        raise DataError(f"policy {policy!r}{scope} has {n} run(s); a confidence interval needs at least 2")

    mean = float(np.mean(samples))
    half = Z_95 * float(np.std(samples, ddof=1)) / math.sqrt(n)
    return MeanRankCI(
        policy=policy,
        n_runs=n,
        mean_rank=mean,
        ci_low=mean - half,
        ci_high=mean + half,
        budget=budget,
    )


def all_cis(table: RankTable) -> List[MeanRankCI]:
    """Overall interval per policy; policies with a single run are skipped."""
    cis = []
    for policy in table.policies:
        if len(table.ranks(policy)) < 2:
            logger.warning(f"Policy {policy} has a single run, no confidence interval")
            continue
        cis.append(mean_rank_ci(table, policy))
    return cis


def budget_cis(table: RankTable) -> List[MeanRankCI]:
    """Per-budget intervals; budgets with a single run of a policy are skipped."""
    cis = []
    for budget in table.budgets:
        for policy in table.policies:
            if len(table.ranks(policy, budget)) >= 2:
                cis.append(mean_rank_ci(table, policy, budget))
    return cis


def boxplot_stats(table: RankTable, policy: str, budget: float) -> BoxStats:
    """Quartiles by linear interpolation, Tukey whiskers at 1.5·IQR."""
    ranks = sorted(table.ranks(policy, budget))
    if not ranks:
        raise DataError(f"no ranks for policy {policy!r} at budget {budget:g}")

    values = np.asarray(ranks, dtype=float)
    q1, median, q3 = (float(q) for q in np.percentile(values, [25, 50, 75], method="linear"))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = values[(values >= lo_fence) & (values <= hi_fence)]

    return BoxStats(
        policy=policy,
        budget=budget,
        n=len(ranks),
        q1=q1,
        median=median,
        q3=q3,
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in values if v < lo_fence or v > hi_fence),
        ranks=tuple(float(v) for v in values),
    )


def rank_distribution(table: RankTable) -> List[BoxStats]:
    return [
        boxplot_stats(table, policy, budget)
        for budget in table.budgets
        for policy in table.policies
        if table.ranks(policy, budget)
    ]


def best_per_family(table: RankTable) -> Dict[str, str]:
    """Lowest mean rank per policy family; ties go to the smaller name."""
    best: Dict[str, Tuple[float, str]] = {}
    for policy in table.policies:
        mean = float(np.mean(table.ranks(policy)))
        family = policy_family(policy)
        if family not in best or (mean, policy) < best[family]:
            best[family] = (mean, policy)
    return {family: name for family, (_, name) in sorted(best.items())}


def restrict(results: Iterable[RunResult], names: Iterable[str]) -> List[RunResult]:
    """Keep only runs of the named policies, for re-ranking a shortlist."""
    keep = set(names)
    return [r for r in results if r.policy_name in keep]
