"""
Trace file loader.
Reads and writes tuning traces as CSV or JSON and groups them by dataset.
"""

import csv
import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Optional, Tuple

from pydantic import ValidationError

from app.core.errors import TraceDomainError, TraceParseError
from app.traces.models import TraceEvent, TuningTrace

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("dataset_id", "arm_id", "elapsed_seconds", "accuracy")

TraceFormat = Literal["csv", "json"]


def infer_format(path: Path) -> TraceFormat:
    """Pick the trace format from a file suffix."""
    suffix = path.suffix.lower()
    if suffix == ".json":
        return "json"
    if suffix == ".csv":
        return "csv"
    raise TraceParseError(str(path), 0, f"cannot infer trace format from suffix {suffix!r}")


def group_by_dataset(traces: Iterable[TuningTrace]) -> Dict[str, List[TuningTrace]]:
    """Group traces by dataset, keeping first-appearance order of datasets and arms."""
    grouped: Dict[str, List[TuningTrace]] = {}
    seen = set()
    for trace in traces:
        key = (trace.dataset_id, trace.arm_id)
        if key in seen:
            raise TraceDomainError(f"duplicate trace for dataset {trace.dataset_id!r}, arm {trace.arm_id!r}")
        seen.add(key)
        grouped.setdefault(trace.dataset_id, []).append(trace)
    return grouped


def _build_trace(
    dataset_id: str,
    arm_id: str,
    rows: List[Tuple[float, float, int]],
    path: str,
) -> TuningTrace:
    # rows: (t, accuracy, line); stable sort keeps the first line for duplicate reporting
    rows = sorted(rows, key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if cur[0] == prev[0]:
            raise TraceDomainError(
                f"duplicate elapsed_seconds {cur[0]!r} for dataset {dataset_id!r}, arm {arm_id!r} "
                f"(also on line {prev[2]})",
                path=path,
                line=cur[2],
            )
    events = tuple(TraceEvent(t=t, accuracy=acc) for t, acc, _ in rows)
    return TuningTrace(arm_id=arm_id, dataset_id=dataset_id, events=events)


def _check_values(t: float, accuracy: float, path: str, line: int, dataset_id: str, arm_id: str) -> None:
    if not (math.isfinite(t) and math.isfinite(accuracy)):
        raise TraceDomainError(
            f"non-finite value for dataset {dataset_id!r}, arm {arm_id!r}", path=path, line=line
        )
    if t < 0:
        raise TraceDomainError(
            f"elapsed_seconds {t!r} is negative for dataset {dataset_id!r}, arm {arm_id!r}",
            path=path,
            line=line,
        )
    if not 0.0 <= accuracy <= 1.0:
        raise TraceDomainError(
            f"accuracy {accuracy!r} outside [0, 1] for dataset {dataset_id!r}, arm {arm_id!r}",
            path=path,
            line=line,
        )


def _load_csv(path: Path) -> List[TuningTrace]:
    rows: Dict[Tuple[str, str], List[Tuple[float, float, int]]] = defaultdict(list)
    order: List[Tuple[str, str]] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_COLUMNS:
            raise TraceParseError(str(path), 1, f"header must be {','.join(CSV_COLUMNS)}, got {header!r}")
        for record in reader:
            line = reader.line_num
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(CSV_COLUMNS):
                raise TraceParseError(str(path), line, f"expected {len(CSV_COLUMNS)} columns, got {len(record)}")
            dataset_id, arm_id, t_raw, acc_raw = (cell.strip() for cell in record)
            if not dataset_id or not arm_id:
                raise TraceParseError(str(path), line, "dataset_id and arm_id must be non-empty")
            try:
                t = float(t_raw)
                accuracy = float(acc_raw)
            except ValueError:
                raise TraceParseError(str(path), line, f"non-numeric value in {record!r}") from None
            _check_values(t, accuracy, str(path), line, dataset_id, arm_id)
            key = (dataset_id, arm_id)
            if key not in rows:
                order.append(key)
            rows[key].append((t, accuracy, line))
    return [_build_trace(d, a, rows[(d, a)], str(path)) for d, a in order]


def _load_json(path: Path) -> List[TuningTrace]:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise TraceParseError(str(path), e.lineno, e.msg) from None
    if not isinstance(payload, list):
        raise TraceParseError(str(path), 1, "top-level JSON value must be an array of traces")

    traces = []
    for index, item in enumerate(payload):
        where = f"{path}[{index}]"
        try:
            dataset_id = str(item["dataset_id"])
            arm_id = str(item["arm_id"])
            raw_events = item["events"]
            rows = [(float(e["t"]), float(e["accuracy"]), index) for e in raw_events]
        except (KeyError, TypeError, ValueError) as e:
            raise TraceParseError(where, 0, f"malformed trace object: {e}") from None
        for t, accuracy, _ in rows:
            _check_values(t, accuracy, where, 0, dataset_id, arm_id)
        try:
            traces.append(_build_trace(dataset_id, arm_id, rows, where))
        except ValidationError as e:
            raise TraceDomainError(str(e), path=where) from None
    return traces


def load_traces(path: str | Path, format: Optional[TraceFormat] = None) -> Dict[str, List[TuningTrace]]:
    """Load traces from a CSV or JSON file, grouped by dataset_id.

    Events are sorted by time; duplicate timestamps within an arm,
    accuracies outside [0, 1] and malformed rows raise with the offending line.
    """
    path = Path(path)
    fmt = format or infer_format(path)
    if not path.exists():
        raise TraceParseError(str(path), 0, "file not found")

    traces = _load_csv(path) if fmt == "csv" else _load_json(path)
    grouped = group_by_dataset(traces)
    logger.info(f"Loaded {len(traces)} traces over {len(grouped)} datasets from {path}")
    return grouped


def save_traces(traces: Iterable[TuningTrace], path: str | Path, format: Optional[TraceFormat] = None) -> Path:
    """Write traces so that load_traces reproduces them exactly."""
    path = Path(path)
    fmt = format or infer_format(path)
    traces = list(traces)
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for trace in traces:
                for event in trace.events:
                    writer.writerow([trace.dataset_id, trace.arm_id, repr(event.t), repr(event.accuracy)])
    else:
        payload = [
            {
                "dataset_id": trace.dataset_id,
                "arm_id": trace.arm_id,
                "events": [{"t": e.t, "accuracy": e.accuracy} for e in trace.events],
            }
            for trace in traces
        ]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    logger.info(f"Wrote {len(traces)} traces to {path}")
    return path
