"""
run and sweep commands.
Execute an experiment configuration and write per-cell results.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click

from app.commands.common import exit_on_error, workers_option
from app.core.errors import ConfigError
from app.policies import PolicySpec
from app.services.experiment import ExperimentRunner, resolve_traces
from app.utils.config_loader import (
    ExperimentConfig,
    expand_policies,
    load_experiment_config,
    with_overrides,
)

logger = logging.getLogger(__name__)


def _execute(config: ExperimentConfig, specs: List[PolicySpec], workers: Optional[int]) -> None:
    datasets = resolve_traces(config)
    runner = ExperimentRunner(config, specs, datasets, workers=workers)
    manifest = runner.run(Path(config.output_dir))
    click.echo(
        f"{manifest['n_completed']}/{manifest['n_cells']} cells completed, "
        f"results in {config.output_dir}"
    )


@click.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Experiment YAML.")
@click.option("--budget", "budgets", multiple=True, type=click.FloatRange(min=0, min_open=True), help="Override budgets (repeatable).")
@click.option("--seed", "seeds", multiple=True, type=click.IntRange(min=0), help="Override seeds (repeatable).")
@click.option("--out", "output_dir", default=None, type=click.Path(file_okay=False), help="Override output directory.")
@workers_option
@exit_on_error
def run_command(
    config_path: str,
    budgets: Tuple[float, ...],
    seeds: Tuple[int, ...],
    output_dir: Optional[str],
    workers: Optional[int],
):
    """Run every (dataset, budget, seed, policy) cell of a config."""
    config = with_overrides(
        load_experiment_config(config_path),
        budgets=list(budgets),
        seeds=list(seeds),
        output_dir=output_dir,
        workers=workers,
    )
    if config.has_grids:
        raise ConfigError("config contains parameter grids (list-valued policy parameters); use 'sweep'")

    specs, dropped = expand_policies(config)
    if dropped:
        raise ConfigError(f"policies: eps1 + eps2 must not exceed 1, got {dropped}")
    _execute(config, specs, workers)


@click.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Experiment YAML with grids.")
@click.option("--out", "output_dir", default=None, type=click.Path(file_okay=False), help="Override output directory.")
@workers_option
@exit_on_error
def sweep_command(config_path: str, output_dir: Optional[str], workers: Optional[int]):
    """Expand parameter grids into concrete policies and run them all."""
    config = with_overrides(load_experiment_config(config_path), output_dir=output_dir, workers=workers)

    specs, dropped = expand_policies(config)
    if dropped:
        pairs = ", ".join(f"({e1:g}, {e2:g})" for e1, e2 in dropped)
        logger.warning(f"Dropped {len(dropped)} (eps1, eps2) pair(s) with eps1 + eps2 > 1: {pairs}")
    logger.info(f"Sweep expands to {len(specs)} policies")
    _execute(config, specs, workers)
