"""
Runs experiment grids.
Expands (dataset x budget x seed x policy) cells, executes them on a bounded
worker pool and writes one RunResult file per cell plus a manifest.
"""

import concurrent.futures
import hashlib
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ConfigError, DataError, LCBanditError, PartialFailureError, ReportWriteError
from app.policies import PolicySpec
from app.simulator import RunConfig, RunResult, run
from app.traces import generate_traces, group_by_dataset, load_traces
from app.traces.models import TuningTrace
from app.utils.config_loader import ExperimentConfig, dump_yaml, effective_config

logger = logging.getLogger(__name__)

RUNS_DIR = "runs"
MANIFEST = "manifest.json"
EFFECTIVE_CONFIG = "config.effective.yaml"

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


@dataclass(frozen=True)
class Cell:
    dataset_id: str
    budget: float
    seed: int
    policy: PolicySpec

    @property
    def key(self) -> Tuple[str, float, int, str]:
        return (self.dataset_id, self.budget, self.seed, self.policy.name)

    @property
    def filename(self) -> str:
        dataset = _UNSAFE.sub("_", self.dataset_id)
        return f"{dataset}__{self.policy.name}__B{self.budget:g}__s{self.seed}.json"

    def describe(self) -> Dict:
        return {
            "dataset_id": self.dataset_id,
            "budget": self.budget,
            "seed": self.seed,
            "policy": self.policy.name,
        }


def resolve_traces(config: ExperimentConfig) -> Dict[str, List[TuningTrace]]:
    """Traces of the experiment grouped by dataset."""
    source = config.traces
    if source.synthetic is not None:
        grouped = group_by_dataset(generate_traces(source.synthetic))
    else:
        grouped = load_traces(source.path, source.format)
    if not grouped:
        raise DataError("the experiment has no traces")
    return grouped


def plan_cells(
    datasets: Dict[str, List[TuningTrace]],
    config: ExperimentConfig,
    specs: Sequence[PolicySpec],
) -> List[Cell]:
    """Every (dataset, budget, seed, policy) cell, sorted; budgets are checked up front."""
    too_small = [
        (dataset_id, budget, len(traces))
        for dataset_id, traces in datasets.items()
        for budget in config.budgets
        if budget < config.dt * len(traces)
    ]
    if too_small:
        dataset_id, budget, n_arms = too_small[0]
        raise ConfigError(
            f"budget {budget:g}s is below dt x arms = {config.dt:g} x {n_arms} for dataset "
            f"{dataset_id!r} ({len(too_small)} offending combination(s))"
        )

    cells = [
        Cell(dataset_id=dataset_id, budget=float(budget), seed=seed, policy=spec)
        for dataset_id in datasets
        for budget in config.budgets
        for seed in config.seeds
        for spec in specs
    ]
    return sorted(cells, key=lambda c: c.key)


def _run_cell(traces: List[TuningTrace], run_config: RunConfig) -> str:
    return run(traces, run_config).to_json()


def _execute(traces: List[TuningTrace], run_config: RunConfig) -> Tuple[Optional[str], Optional[str]]:
    """Worker entry point: (serialized result, None) or (None, error message)."""
    try:
        return _run_cell(traces, run_config), None
    except LCBanditError as e:
        return None, f"{type(e).__name__}: {e}"
    except Exception as e:  # recorded as a failed cell
        logger.exception(f"Unexpected failure in cell {run_config.policy.name}")
        return None, f"{type(e).__name__}: {e}"


class ExperimentRunner:
    """Executes the cells of one experiment and records them in a manifest."""

    def __init__(
        self,
        config: ExperimentConfig,
        specs: Sequence[PolicySpec],
        datasets: Dict[str, List[TuningTrace]],
        workers: Optional[int] = None,
    ):
        self.config = config
        self.specs = list(specs)
        self.datasets = datasets
        self.workers = workers or config.workers or settings.WORKERS
        self.keep_curve_snapshots = (
            config.keep_curve_snapshots
            if config.keep_curve_snapshots is not None
            else settings.KEEP_CURVE_SNAPSHOTS
        )
        self.cells = plan_cells(datasets, config, self.specs)

    def run_config(self, cell: Cell) -> RunConfig:
        try:
            return RunConfig(
                budget=cell.budget,
                dt=self.config.dt,
                policy=cell.policy,
                overhead=self.config.overhead,
                seed=cell.seed,
                keep_curve_snapshots=self.keep_curve_snapshots,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid run configuration for {cell.key}: {e}") from e

    def _outcomes(self) -> List[Tuple[Optional[str], Optional[str]]]:
        tasks = [(self.datasets[c.dataset_id], self.run_config(c)) for c in self.cells]
        if self.workers <= 1:
            return [_execute(traces, rc) for traces, rc in tasks]

        with concurrent.futures.ProcessPoolExecutor(max_workers=self.workers) as ex:
            futures = [ex.submit(_execute, traces, rc) for traces, rc in tasks]
            return [f.result() for f in futures]

    def run(self, out_dir: Path) -> Dict:
        """Run every cell, write results, manifest and effective config.

        Raises PartialFailureError after writing the manifest when some cells failed.
        """
        out_dir = Path(out_dir)
        runs_dir = out_dir / RUNS_DIR
        try:
            runs_dir.mkdir(parents=True, exist_ok=True)
            dump_yaml(effective_config(self.config, self.specs), out_dir / EFFECTIVE_CONFIG)
        except OSError as e:
            raise ReportWriteError(f"{out_dir}: {e.strerror or e}") from e

        logger.info(
            f"Running {len(self.cells)} cells ({len(self.datasets)} datasets x "
            f"{len(self.config.budgets)} budgets x {len(self.config.seeds)} seeds x "
            f"{len(self.specs)} policies) on {self.workers} worker(s)"
        )

        completed: List[Dict] = []
        failures: List[Dict] = []
        for cell, (text, error) in zip(self.cells, self._outcomes()):
            if text is None:
                logger.error(f"Cell {cell.filename} failed: {error}")
                failures.append({**cell.describe(), "status": "failed", "error": error})
                continue
            path = runs_dir / cell.filename
            try:
                path.write_text(text, encoding="utf-8")
            except OSError as e:
                failures.append({**cell.describe(), "status": "failed", "error": f"write failed: {e}"})
                continue
            completed.append(
                {
                    **cell.describe(),
                    "file": f"{RUNS_DIR}/{cell.filename}",
                    "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
                    "status": "ok",
                }
            )

        manifest = {
            "n_cells": len(self.cells),
            "n_completed": len(completed),
            "cells": completed,
            "failures": failures,
        }
        try:
            (out_dir / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise ReportWriteError(f"{out_dir / MANIFEST}: {e.strerror or e}") from e

        logger.info(f"Completed {len(completed)}/{len(self.cells)} cells, results in {out_dir}")
        if failures:
            raise PartialFailureError([f["policy"] + "@" + f["dataset_id"] for f in failures])
        return manifest


def load_results(results_dir: str | Path) -> List[RunResult]:
    """Read every RunResult JSON under ``results_dir`` (the runs/ folder when present)."""
    root = Path(results_dir)
    if not root.is_dir():
        raise DataError(f"results directory not found: {root}")
    folder = root / RUNS_DIR if (root / RUNS_DIR).is_dir() else root

    results = []
    for path in sorted(folder.glob("*.json")):
        if path.name == MANIFEST:
            continue
        try:
            results.append(RunResult.from_json(path.read_text(encoding="utf-8")))
        except (ValueError, ValidationError) as e:
            raise DataError(f"{path}: not a valid run result: {e}") from e

    logger.info(f"Loaded {len(results)} run results from {folder}")
    return results
