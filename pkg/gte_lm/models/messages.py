from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProblemKind(str, Enum):
    MTENSOR = "MTensor"
    GENERAL_RANDOM = "GeneralRandom"
    PLANTED_GENERAL = "PlantedGeneral"


class StopRule(str, Enum):
    RESIDUAL_NORM = "ResidualNorm"
    GRADIENT_NORM = "GradientNorm"


class WindowMode(str, Enum):
    ALL = "all"
    ACCEPTED = "accepted"


class SolverStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    STALLED = "Stalled"
    LINEAR_SOLVE_FAILURE = "LinearSolveFailure"


class Verdict(str, Enum):
    HOLDS = "Holds"
    FALSIFIED = "Falsified"
    INCONCLUSIVE = "Inconclusive"


class CheckMethod(str, Enum):
    EXACT_2D = "Exact2D"
    SAMPLING = "Sampling"
    OPTIMIZATION = "Optimization"


class Scenario(str, Enum):
    TABLE1 = "Table1"
    TABLE2 = "Table2"
    TABLE3_LMA_ONLY = "Table3LMAOnly"
    TABLE4_LMA_ONLY = "Table4LMAOnly"
    TABLE5 = "Table5"


class SolverConfig(BaseModel):
    """Parameters of the Levenberg-Marquardt iteration and its stopping rule."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    mu0: float = 1.0
    mu_bar: float = 1e-8
    epsilon: float = Field(2.0, ge=1.0, le=2.0)
    p0: float = 1e-4
    p1: float = 0.25
    p2: float = 0.75
    n0: int = Field(5, ge=1)
    tol: float = Field(1e-12, gt=0.0)
    max_iter: int = Field(1000, ge=1)
    stop_rule: StopRule = StopRule.RESIDUAL_NORM
    window: WindowMode = WindowMode.ALL
    mu_guard: float = Field(1e40, gt=0.0)
    record_iterates: bool = True

    @model_validator(mode="after")
    def _check_ordering(self) -> "SolverConfig":
        if not self.mu0 > self.mu_bar > 0.0:
            raise ValueError(f"need mu0 > mu_bar > 0, got mu0={self.mu0}, mu_bar={self.mu_bar}")
        if not 0.0 < self.p0 <= self.p1 <= self.p2 < 1.0:
            raise ValueError(f"need 0 < p0 <= p1 <= p2 < 1, got ({self.p0}, {self.p1}, {self.p2})")
        return self

    @classmethod
    def for_kind(cls, kind: Optional[ProblemKind], **overrides: Any) -> "SolverConfig":
        """Defaults for a problem kind: epsilon 2 for M-tensors, 1 for general tensors."""
        settings: Dict[str, Any] = {"epsilon": 2.0 if kind in (None, ProblemKind.MTENSOR) else 1.0}
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)


class SolverReport(BaseModel):
    """Outcome and full iteration trace of one solve."""
    solver: str
    status: SolverStatus
    iterations: int
    final_x: List[float]
    residual_history: List[float]
    accepted_flags: List[bool] = []
    mu_history: List[float] = []
    lambda_history: List[float] = []
    tau_history: List[float] = []
    iterates: List[List[float]] = []
    steps: List[List[float]] = []
    wall_time: float = 0.0
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == SolverStatus.CONVERGED

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]

    def numeric_content(self) -> Dict[str, Any]:
        """Everything except wall time, for reproducibility comparisons."""
        return self.model_dump(exclude={"wall_time"})


class ClassReport(BaseModel):
    """Verdict of a tensor-class check, with a witness when the class is falsified."""
    checker: str
    verdict: Verdict
    method: CheckMethod
    samples_used: int = 0
    witness: Optional[List[float]] = None
    witness_pair: Optional[List[float]] = None
    witness_value: Optional[float] = None
    t: Optional[float] = None
    message: str = ""

    @model_validator(mode="after")
    def _falsified_has_witness(self) -> "ClassReport":
        if self.verdict == Verdict.FALSIFIED and self.witness is None:
            raise ValueError("a Falsified report must carry a witness")
        return self


class ErrorBoundReport(BaseModel):
    """Sampled check of a local error bound ||W(x)|| >= c dist(x, X)."""
    samples: int
    constant: float
    violations: int
    max_violation: float
    min_ratio: float


class GenSpec(BaseModel):
    """Recipe for one random problem instance."""
    kind: ProblemKind
    orders: List[int]
    dim: int = Field(ge=1)
    sigma: float = 0.1
    entry_range: Tuple[float, float] = (-5.0, 5.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "GenSpec":
        if not self.orders or any(o < 2 for o in self.orders):
            raise ValueError(f"orders must be >= 2, got {self.orders}")
        if any(a <= b for a, b in zip(self.orders, self.orders[1:])):
            raise ValueError(f"orders must strictly decrease, got {self.orders}")
        if self.kind == ProblemKind.MTENSOR and self.sigma <= 0.0:
            raise ValueError("sigma must be positive for M-tensor instances")
        if not self.entry_range[0] < self.entry_range[1]:
            raise ValueError(f"entry range must be nonempty, got {self.entry_range}")
        return self


class ExperimentSpec(BaseModel):
    """One batch experiment: a scenario, its shapes, kinds and epsilon grid."""
    scenario: Scenario
    shapes: List[Tuple[int, ...]]
    kinds: List[ProblemKind]
    epsilons: List[float]
    trials: int = Field(100, ge=1)
    seed0: int = 0
    tol: float = Field(1e-12, gt=0.0)
    max_iter: int = Field(1000, ge=1)
    full: bool = False
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_shapes(self) -> "ExperimentSpec":
        for shape in self.shapes:
            if len(shape) < 2 or any(o < 2 for o in shape[:-1]) or shape[-1] < 1:
                raise ValueError(f"shape must be (orders..., n), got {shape}")
        if any(not 1.0 <= eps <= 2.0 for eps in self.epsilons):
            raise ValueError(f"epsilon values must lie in [1, 2], got {self.epsilons}")
        return self


class TrialRecord(BaseModel):
    """One solve inside a batch."""
    shape: Tuple[int, ...]
    kind: ProblemKind
    epsilon: float
    trial: int
    iterations: int
    wall_time: float
    residual: float
    status: SolverStatus
    success: bool


class BatchRow(BaseModel):
    """Aggregated statistics for one (shape, kind, epsilon) cell of a table."""
    shape: str
    kind: str
    epsilon: Optional[float] = None
    trials: int = 0
    successes: int = 0
    itr_mean: Optional[float] = None
    time_mean_s: Optional[float] = None
    resi_mean: Optional[float] = None
    sr: Optional[float] = None
    error: Optional[str] = None


class BatchResult(BaseModel):
    """Rows of an experiment table plus the per-trial records they summarize."""
    spec: ExperimentSpec
    rows: List[BatchRow]
    records: List[TrialRecord]

    def numeric_content(self) -> Dict[str, Any]:
        """All numeric fields except wall times."""
        return {
            "rows": [r.model_dump(exclude={"time_mean_s"}) for r in self.rows],
            "records": [r.model_dump(exclude={"wall_time"}) for r in self.records],
        }
