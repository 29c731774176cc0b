from app.analysis.ranking import (
    BoxStats,
    MeanRankCI,
    RankRow,
    RankTable,
    all_cis,
    best_per_family,
    boxplot_stats,
    budget_cis,
    mean_rank_ci,
    rank_distribution,
    rank_runs,
    restrict,
)
from app.analysis.report import emit_report, summary_text

__all__ = [
    "BoxStats",
    "MeanRankCI",
    "RankRow",
    "RankTable",
    "all_cis",
    "best_per_family",
    "boxplot_stats",
    "budget_cis",
    "emit_report",
    "mean_rank_ci",
    "rank_distribution",
    "rank_runs",
    "restrict",
    "summary_text",
]
