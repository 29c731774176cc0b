from app.simulator.arms import ArmState, reveal
from app.simulator.engine import ReplaySimulator, charge_overhead, run
from app.simulator.models import (
    ArmCurveState,
    CurveSnapshot,
    DecisionRecord,
    OverheadMode,
    OverheadModel,
    RunConfig,
    RunResult,
)

__all__ = [
    "ArmCurveState",
    "ArmState",
    "CurveSnapshot",
    "DecisionRecord",
    "OverheadMode",
    "OverheadModel",
    "ReplaySimulator",
    "RunConfig",
    "RunResult",
    "charge_overhead",
    "reveal",
    "run",
]
