"""
analyze command.
Ranks run results and writes the report files.
"""

import csv
import logging
from pathlib import Path
from typing import Dict

import click

from app.analysis import RankTable, all_cis, best_per_family, emit_report, rank_runs, restrict, summary_text
from app.commands.common import exit_on_error
from app.core.errors import ReportWriteError
from app.services.experiment import load_results

logger = logging.getLogger(__name__)


@click.command("analyze")
@click.option("--results", "results_dir", required=True, type=click.Path(file_okay=False), help="Directory of run results.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Report directory.")
@click.option(
    "--best-per-family",
    "two_stage",
    is_flag=True,
    default=False,
    help="Pick each family's best parametrization, then rank the winners against each other.",
)
@exit_on_error
def analyze_command(results_dir: str, out_dir: str, two_stage: bool):
    """Rank policies per (dataset, budget, seed) and compute mean-rank CIs."""
    results = load_results(results_dir)
    table = rank_runs(results)

    out = Path(out_dir)
    if two_stage:
        winners = write_family_winners(table, out)
        table = rank_runs(restrict(results, winners.values()))

    cis = all_cis(table)
    emit_report(table, cis, out)
    click.echo(summary_text(table, cis), nl=False)


def write_family_winners(table: RankTable, out: Path) -> Dict[str, str]:
    """Select and record the best parametrization of every family."""
    winners = best_per_family(table)
    for family, name in winners.items():
        logger.info(f"Best {family}: {name}")

    path = out / "best_per_family.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("family", "policy"))
            writer.writerows(winners.items())
    except OSError as e:
        raise ReportWriteError(f"{path}: {e.strerror or e}") from e
    return winners
