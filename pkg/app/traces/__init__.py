from app.traces.loader import group_by_dataset, load_traces, save_traces
from app.traces.models import ArmCurve, CurveShape, SyntheticSpec, TraceEvent, TuningTrace
from app.traces.synthetic import crossing_family, generate_traces, ground_truth

__all__ = [
    "ArmCurve",
    "CurveShape",
    "SyntheticSpec",
    "TraceEvent",
    "TuningTrace",
    "crossing_family",
    "generate_traces",
    "ground_truth",
    "group_by_dataset",
    "load_traces",
    "save_traces",
]
