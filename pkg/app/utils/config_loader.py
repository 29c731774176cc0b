"""
Load YAML experiment configurations.
Parses experiment and synthetic-trace files into validated models and
expands policy parameter grids.
"""

import itertools
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.errors import ConfigError
from app.policies import PolicyKind, PolicySpec, canonical_kind
from app.simulator.models import OverheadModel
from app.traces.models import SyntheticSpec
from app.traces.synthetic import crossing_family

logger = logging.getLogger(__name__)

PRESETS_DIR = Path(__file__).resolve().parent.parent / "presets"
GRID_PARAMS = ("eps1", "eps2", "rho", "k")
DEFAULT_EPS = PolicySpec.model_fields["eps1"].default

PresetName = Literal["experiment1", "experiment2"]


class PolicyEntry(BaseModel):
    """A policy, or a grid of policies when any parameter is a list."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PolicyKind
    eps1: Optional[Union[float, List[float]]] = None
    eps2: Optional[Union[float, List[float]]] = None
    rho: Optional[Union[float, List[float]]] = None
    k: Optional[Union[int, List[int]]] = None

    @field_validator("kind", mode="before")
    @classmethod
    def _alias_kind(cls, value):
        return canonical_kind(value)

    @field_validator("eps1", "eps2", "rho", "k")
    @classmethod
    def _non_empty_grid(cls, value):
        if isinstance(value, list) and not value:
            raise ValueError("parameter grid must not be empty")
        return value

    @model_validator(mode="after")
    def _scalar_probabilities(self) -> "PolicyEntry":
        # only grids may drop pairs; a single pair above 1 is a config error
        if self.kind is PolicyKind.MASTER_LC and not isinstance(self.eps1, list) and not isinstance(self.eps2, list):
            eps1 = DEFAULT_EPS if self.eps1 is None else self.eps1
            eps2 = DEFAULT_EPS if self.eps2 is None else self.eps2
            if eps1 + eps2 > 1.0 + 1e-12:
                raise ValueError(f"eps1 + eps2 must be <= 1, got {eps1:g} + {eps2:g}")
        return self

    @property
    def is_grid(self) -> bool:
        return any(isinstance(getattr(self, name), list) for name in GRID_PARAMS)

    def expand(self) -> Tuple[List[PolicySpec], List[Tuple[float, float]]]:
        """Cartesian product of the parameter grids.

        Returns the concrete specs and the (eps1, eps2) pairs dropped because
        their sum exceeds 1.
        """
        given = {name: getattr(self, name) for name in GRID_PARAMS if getattr(self, name) is not None}
        names = list(given)
        axes = [v if isinstance(v, list) else [v] for v in given.values()]

        specs: List[PolicySpec] = []
        dropped: List[Tuple[float, float]] = []
        for combo in itertools.product(*axes):
            params = dict(zip(names, combo))
            eps1 = params.get("eps1", DEFAULT_EPS)
            eps2 = params.get("eps2", DEFAULT_EPS)
            # out-of-range values fall through to PolicySpec and fail validation
            if self.kind is PolicyKind.MASTER_LC and eps1 + eps2 > 1.0 + 1e-12 and eps1 <= 1.0 and eps2 <= 1.0:
                dropped.append((eps1, eps2))
                continue
            specs.append(PolicySpec(kind=self.kind, **params))
        return specs, dropped


def synthetic_spec_from(data: Dict[str, Any]) -> SyntheticSpec:
    """A SyntheticSpec mapping, or ``{crossing: {...}}`` for the crossing family."""
    if "crossing" not in data:
        return SyntheticSpec.model_validate(data)
    params = data["crossing"] or {}
    if not isinstance(params, dict):
        raise ValueError("'crossing' must be a mapping of crossing_family arguments")
    try:
        return crossing_family(**params)
    except TypeError as e:
        raise ValueError(f"crossing: {e}") from e


class TracesSource(BaseModel):
    """Where the traces of an experiment come from: a file or a synthetic spec."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    path: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None
    synthetic: Optional[SyntheticSpec] = None

    @field_validator("synthetic", mode="before")
    @classmethod
    def _crossing_shorthand(cls, value):
        if isinstance(value, dict) and "crossing" in value:
            return synthetic_spec_from(value)
        return value

    @model_validator(mode="after")
    def _exactly_one(self) -> "TracesSource":
        if (self.path is None) == (self.synthetic is None):
            raise ValueError("give exactly one of 'path' or 'synthetic'")
        return self


class ExperimentConfig(BaseModel):
    """One experiment: traces x budgets x policies x seeds."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    traces: TracesSource
    preset: Optional[PresetName] = Field(default=None, description="Fill budgets/policies from the packaged grids")
    budgets: List[float] = Field(default_factory=list)
    dt: float = Field(default=10.0, gt=0.0)
    policies: List[PolicyEntry] = Field(default_factory=list)
    overhead: OverheadModel = Field(default_factory=OverheadModel)
    seeds: List[int] = Field(default_factory=lambda: [0])
    output_dir: str = Field(default="results")
    workers: Optional[int] = Field(default=None, ge=1)
    keep_curve_snapshots: Optional[bool] = None

    @model_validator(mode="before")
    @classmethod
    def _apply_preset(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("preset"):
            preset = load_preset(data["preset"])
            data = dict(data)
            if not data.get("budgets"):
                data["budgets"] = preset["budgets"]
            if not data.get("policies"):
                data["policies"] = preset["policies"]
            data.setdefault("dt", preset["dt"])
        return data

    @model_validator(mode="after")
    def _complete(self) -> "ExperimentConfig":
        if not self.budgets:
            raise ValueError("budgets must not be empty")
        if not self.policies:
            raise ValueError("policies must not be empty")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        for budget in self.budgets:
            if budget < self.dt:
                raise ValueError(f"budget {budget:g} is shorter than dt {self.dt:g}")
        if any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative")
        return self

    @property
    def has_grids(self) -> bool:
        return any(entry.is_grid for entry in self.policies)


def _format_validation_error(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return data


def load_preset(name: str) -> Dict[str, Any]:
    """Budgets, dt and policy grids of a packaged preset."""
    table = _read_yaml(PRESETS_DIR / "table2.yaml")
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}")
    return {"dt": table["dt"], "policies": table["policies"], "budgets": table[name]["budgets"]}


def parse_experiment_config(data: Dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {_format_validation_error(e)}") from e


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Load an experiment YAML; a relative trace path resolves against the config's directory."""
    path = Path(path)
    data = _read_yaml(path)
    traces = data.get("traces")
    if isinstance(traces, dict) and traces.get("path"):
        trace_path = Path(traces["path"])
        if not trace_path.is_absolute():
            data = {**data, "traces": {**traces, "path": str((path.parent / trace_path).resolve())}}

    config = parse_experiment_config(data, str(path))
    logger.info(
        f"Loaded config {path}: {len(config.budgets)} budgets, "
        f"{len(config.policies)} policy entries, {len(config.seeds)} seeds"
    )
    return config


def with_overrides(
    config: ExperimentConfig,
    budgets: Optional[List[float]] = None,
    seeds: Optional[List[int]] = None,
    output_dir: Optional[str] = None,
    workers: Optional[int] = None,
) -> ExperimentConfig:
    """Apply command-line overrides and re-validate."""
    data = config.model_dump(mode="json", exclude_none=True)
    if budgets:
        data["budgets"] = list(budgets)
    if seeds:
        data["seeds"] = list(seeds)
    if output_dir is not None:
        data["output_dir"] = output_dir
    if workers is not None:
        data["workers"] = workers
    return parse_experiment_config(data, "<overrides>")


def expand_policies(config: ExperimentConfig) -> Tuple[List[PolicySpec], List[Tuple[float, float]]]:
    """Concrete policies of the config, deduplicated by name in order of appearance."""
    specs: List[PolicySpec] = []
    dropped: List[Tuple[float, float]] = []
    seen = set()
    try:
        for entry in config.policies:
            entry_specs, entry_dropped = entry.expand()
            dropped.extend(entry_dropped)
            for spec in entry_specs:
                if spec.name not in seen:
                    seen.add(spec.name)
                    specs.append(spec)
    except ValidationError as e:
        raise ConfigError(f"policies: {_format_validation_error(e)}") from e
    return specs, dropped


def effective_config(config: ExperimentConfig, specs: List[PolicySpec]) -> Dict[str, Any]:
    """Fully expanded config: no preset, one scalar entry per concrete policy."""
    data = config.model_dump(mode="json", exclude_none=True)
    data.pop("preset", None)
    data["policies"] = [spec.model_dump(mode="json") for spec in specs]
    return data


def dump_yaml(data: Dict[str, Any], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=False, default_flow_style=False)


def load_synthetic_spec(path: str | Path) -> SyntheticSpec:
    """Load a SyntheticSpec YAML, or a ``crossing:`` block naming the preset family."""
    path = Path(path)
    data = _read_yaml(path)
    try:
        return synthetic_spec_from(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: {_format_validation_error(e)}") from e
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e
