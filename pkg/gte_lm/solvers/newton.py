"""
Plain Newton iteration, used as the comparison baseline.
"""

from typing import Optional
import time

import numpy as np
from numpy.linalg import LinAlgError, norm

from .base import BaseSolver
from ..models import SolverReport, SolverStatus
from ..problem import GteProblem, jacobian, residual
from ..tensor import _as_vector

COND_LIMIT = 1e14


class NewtonSolver(BaseSolver):
    """Newton's method ``x <- x - F'(x)^{-1} F(x)`` with a conditioning guard."""

    def __init__(self, tol: float = 1e-12, max_iter: int = 1000, cond_limit: float = COND_LIMIT):
        super().__init__(
            name="newton",
            description="Newton iteration on the generalized tensor equation"
        )
        self.tol = tol
        self.max_iter = max_iter
        self.cond_limit = cond_limit

    def solve(self, problem: GteProblem, x0) -> SolverReport:
        start_time = time.perf_counter()
        self.logger.clear()

        x = np.array(_as_vector(x0, problem.dim), dtype=float)
        F = residual(problem, x)
        norm_f = float(norm(F))
        trace = {"residual": [norm_f], "accepted": [], "iterates": [x.tolist()], "steps": []}

        k = 0
        while True:
            if norm_f <= self.tol:
                return self._create_report(SolverStatus.CONVERGED, x, trace, start_time)
            if k >= self.max_iter:
                return self._create_report(
                    SolverStatus.MAX_ITERATIONS, x, trace, start_time,
                    message=f"no convergence in {self.max_iter} iterations"
                )

            J = jacobian(problem, x)
            cond = float(np.linalg.cond(J))
            if not np.isfinite(cond) or cond > self.cond_limit:
                return self._create_report(
                    SolverStatus.LINEAR_SOLVE_FAILURE, x, trace, start_time,
                    message=f"Jacobian numerically singular (condition number {cond:.3e})"
                )
            try:
                d = np.linalg.solve(J, -F)
            except LinAlgError as e:
                return self._create_report(
                    SolverStatus.LINEAR_SOLVE_FAILURE, x, trace, start_time,
                    message=str(e)
                )

            x = x + d
            F = residual(problem, x)
            norm_f = float(norm(F))
            k += 1
            trace["residual"].append(norm_f)
            trace["accepted"].append(True)
            trace["iterates"].append(x.tolist())
            trace["steps"].append(d.tolist())
            self.logger.debug(f"iter {k}: residual {norm_f:.3e}", iteration=k, residual=norm_f)

            if not np.isfinite(norm_f):
                return self._create_report(
                    SolverStatus.STALLED, x, trace, start_time,
                    message="iterate diverged to a non-finite residual"
                )


def newton_solve(problem: GteProblem, x0, tol: float = 1e-12, max_iter: int = 1000,
                 cond_limit: Optional[float] = None) -> SolverReport:
    """Solve ``F(x) = 0`` from ``x0`` with Newton's method."""
    return NewtonSolver(tol, max_iter, cond_limit or COND_LIMIT).solve(problem, x0)
