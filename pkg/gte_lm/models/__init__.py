from .messages import (
    BatchResult,
    BatchRow,
    CheckMethod,
    ClassReport,
    ErrorBoundReport,
    ExperimentSpec,
    GenSpec,
    ProblemKind,
    Scenario,
    SolverConfig,
    SolverReport,
    SolverStatus,
    StopRule,
    TrialRecord,
    Verdict,
    WindowMode,
)

__all__ = [
    "BatchResult",
    "BatchRow",
    "CheckMethod",
    "ClassReport",
    "ErrorBoundReport",
    "ExperimentSpec",
    "GenSpec",
    "ProblemKind",
    "Scenario",
    "SolverConfig",
    "SolverReport",
    "SolverStatus",
    "StopRule",
    "TrialRecord",
    "Verdict",
    "WindowMode",
]
