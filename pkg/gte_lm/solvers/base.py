from abc import ABC, abstractmethod
from typing import Dict, List, Optional
import time

import numpy as np

from ..models import SolverReport, SolverStatus
from ..problem import GteProblem
from ..utils import RunLogger


class BaseSolver(ABC):
    """Base class for all equation solvers."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.logger = RunLogger(name)

    @abstractmethod
    def solve(self, problem: GteProblem, x0) -> SolverReport:
        """Run the iteration from ``x0`` and return the full report."""
        pass

    def _create_report(
        self,
        status: SolverStatus,
        x: np.ndarray,
        trace: Dict[str, list],
        start_time: float,
        message: str = ""
    ) -> SolverReport:
        """Create standardized solver report."""
        report = SolverReport(
            solver=self.name,
            status=status,
            iterations=len(trace["residual"]) - 1,
            final_x=[float(v) for v in x],
            residual_history=trace["residual"],
            accepted_flags=trace.get("accepted", []),
            mu_history=trace.get("mu", []),
            lambda_history=trace.get("lambda", []),
            tau_history=trace.get("tau", []),
            iterates=trace.get("iterates", []),
            steps=trace.get("steps", []),
            wall_time=time.perf_counter() - start_time,
            message=message
        )
        self.logger.info(
            f"{self.name}: {status.value} after {report.iterations} iterations, "
            f"residual {report.final_residual:.3e}",
            status=status.value,
            iterations=report.iterations,
            residual=report.final_residual
        )
        return report


class SolverRegistry:
    """Registry for managing available solvers."""

    def __init__(self):
        self._solvers: Dict[str, BaseSolver] = {}

    def register(self, key: str, solver: BaseSolver):
        """Register a solver under a lookup key."""
        self._solvers[key] = solver

    def get_solver(self, name: str) -> Optional[BaseSolver]:
        """Get solver by name."""
        return self._solvers.get(name)

    def list_solvers(self) -> List[str]:
        """List all registered solver keys."""
        return list(self._solvers.keys())
