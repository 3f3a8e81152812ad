from typing import Optional

from .base import BaseSolver, SolverRegistry
from .levenberg_marquardt import (
    LevenbergMarquardtSolver,
    accepted_residuals,
    envelope_history,
    lm_solve,
    quadratic_rate_slope,
)
from .newton import NewtonSolver, newton_solve
from ..models import SolverConfig

SOLVER_NAMES = ("lm", "newton")


def default_registry(config: Optional[SolverConfig] = None) -> SolverRegistry:
    """Registry keyed by the ``solve --solver`` names, both solvers sharing ``config``."""
    config = config or SolverConfig()
    registry = SolverRegistry()
    registry.register("lm", LevenbergMarquardtSolver(config))
    registry.register("newton", NewtonSolver(tol=config.tol, max_iter=config.max_iter))
    return registry


__all__ = [
    "BaseSolver",
    "SolverRegistry",
    "LevenbergMarquardtSolver",
    "NewtonSolver",
    "lm_solve",
    "newton_solve",
    "accepted_residuals",
    "envelope_history",
    "quadratic_rate_slope",
    "SOLVER_NAMES",
    "default_registry",
]
