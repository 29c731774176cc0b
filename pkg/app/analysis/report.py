"""
Report files for a ranked experiment.

Everything written here is sorted deterministically so re-running on the
same results yields byte-identical files.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

from app.analysis.ranking import (
    MeanRankCI,
    RankTable,
    budget_cis,
    rank_distribution,
)
from app.core.errors import ReportWriteError
from app.policies import policy_family

logger = logging.getLogger(__name__)

RANKS_COLUMNS = ("policy", "dataset_id", "budget_s", "best_accuracy", "rank", "seed")
DISTRIBUTION_COLUMNS = (
    "policy", "budget_s", "n", "q1", "median", "q3",
    "whisker_low", "whisker_high", "outliers", "ranks",
)
CI_COLUMNS = ("policy", "n_runs", "mean_rank", "ci_low", "ci_high")
BUDGET_CI_COLUMNS = ("policy", "budget_s", "n_runs", "mean_rank", "ci_low", "ci_high")


def _num(value: float) -> str:
    return repr(float(value))


def _join(values: Iterable[float]) -> str:
    return " ".join(_num(v) for v in values)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ReportWriteError(f"{path}: {e.strerror or e}") from e


def _sorted_cis(cis: Iterable[MeanRankCI]) -> List[MeanRankCI]:
    return sorted(cis, key=lambda ci: (ci.budget if ci.budget is not None else -1.0, ci.policy))


def summary_text(table: RankTable, cis: Sequence[MeanRankCI]) -> str:
    """Human-readable table of mean ranks, best first."""
    lines = [
        f"Policies: {len(table.policies)}  Cells: {len(table.cells)}  Budgets: "
        + (", ".join(f"{b:g}s" for b in table.budgets) or "-"),
        "",
    ]
    width = max([len("policy")] + [len(ci.policy) for ci in cis])
    lines.append(f"{'policy':<{width}}  {'family':<14}  {'runs':>5}  {'mean rank':>9}  95% CI")
    lines.append("-" * (width + 52))
    for ci in sorted(cis, key=lambda c: (c.mean_rank, c.policy)):
        lines.append(
            f"{ci.policy:<{width}}  {policy_family(ci.policy):<14}  {ci.n_runs:>5}  "
            f"{ci.mean_rank:>9.3f}  [{ci.ci_low:.3f}, {ci.ci_high:.3f}]"
        )
    return "\n".join(lines) + "\n"


def emit_report(table: RankTable, cis: Sequence[MeanRankCI], out: Path) -> List[Path]:
    """Write ranks.csv, rank_distribution.csv, cis.csv, cis_by_budget.csv and summary.txt."""
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportWriteError(f"{out}: {e.strerror or e}") from e

    ranks_path = out / "ranks.csv"
    _write_csv(
        ranks_path,
        RANKS_COLUMNS,
        (
            (r.policy, r.dataset_id, _num(r.budget), _num(r.best_accuracy), _num(r.rank), r.seed)
            for r in table.rows
        ),
    )

    distribution_path = out / "rank_distribution.csv"
    _write_csv(
        distribution_path,
        DISTRIBUTION_COLUMNS,
        (
            (
                s.policy, _num(s.budget), s.n, _num(s.q1), _num(s.median), _num(s.q3),
                _num(s.whisker_low), _num(s.whisker_high), _join(s.outliers), _join(s.ranks),
            )
            for s in rank_distribution(table)
        ),
    )

    cis_path = out / "cis.csv"
    _write_csv(
        cis_path,
        CI_COLUMNS,
        ((ci.policy, ci.n_runs, _num(ci.mean_rank), _num(ci.ci_low), _num(ci.ci_high)) for ci in _sorted_cis(cis)),
    )

    by_budget_path = out / "cis_by_budget.csv"
    _write_csv(
        by_budget_path,
        BUDGET_CI_COLUMNS,
        (
            (ci.policy, _num(ci.budget), ci.n_runs, _num(ci.mean_rank), _num(ci.ci_low), _num(ci.ci_high))
            for ci in _sorted_cis(budget_cis(table))
        ),
    )

    summary_path = out / "summary.txt"
    try:
        summary_path.write_text(summary_text(table, cis), encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"{summary_path}: {e.strerror or e}") from e

    paths = [ranks_path, distribution_path, cis_path, by_budget_path, summary_path]
    logger.info(f"Wrote report ({len(table.rows)} rank rows, {len(cis)} intervals) to {out}")
    return paths
