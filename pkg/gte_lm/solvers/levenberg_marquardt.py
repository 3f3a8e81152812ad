"""
Nonmonotone Levenberg-Marquardt iteration for generalized tensor equations.

Each iteration takes the damping parameter

    lambda_k = mu_k ||F(x_k)||^eps / (1 + ||F(x_k)||),

solves the damped normal equations (J^T J + lambda_k I) d = -J^T F as the
stacked least-squares problem [J; sqrt(lambda_k) I] d = [-F; 0], and accepts the step when the ratio of the actual
reduction against the worst of the last N0 + 1 residuals to the predicted
reduction reaches p0. mu_k is multiplied by 4, kept, or divided by 4 (floored
at mu_bar) according to where the ratio falls against p1 and p2.
"""

from typing import List, Optional
import math
import time

import numpy as np
from numpy.linalg import LinAlgError, norm
from scipy.linalg import lstsq

from .base import BaseSolver
from ..models import SolverConfig, SolverReport, SolverStatus, StopRule, WindowMode
from ..problem import GteProblem, jacobian, residual
from ..tensor import _as_vector


class LevenbergMarquardtSolver(BaseSolver):
    """Levenberg-Marquardt with the nonmonotone gain ratio and residual-driven damping."""

    def __init__(self, config: Optional[SolverConfig] = None):
        super().__init__(
            name="levenberg_marquardt",
            description="Nonmonotone Levenberg-Marquardt for A_1 x^{m-1} + ... + A_{m-1} x = b"
        )
        self.config = config or SolverConfig()

    def _converged(self, norm_f: float, gradient: np.ndarray) -> bool:
        # GradientNorm adds a condition; a stationary point with a large residual is not a root
        if self.config.stop_rule == StopRule.GRADIENT_NORM and float(norm(gradient)) > self.config.tol:
            return False
        return norm_f <= self.config.tol

    def solve(self, problem: GteProblem, x0) -> SolverReport:
        cfg = self.config
        start_time = time.perf_counter()
        self.logger.clear()

        x = np.array(_as_vector(x0, problem.dim), dtype=float)
        F = residual(problem, x)
        norm_f = float(norm(F))
        mu = cfg.mu0
        eye = np.eye(problem.dim)
        zeros = np.zeros(problem.dim)

        trace = {
            "residual": [norm_f],
            "accepted": [],
            "mu": [mu],
            "lambda": [],
            "tau": [],
            "iterates": [x.tolist()] if cfg.record_iterates else [],
            "steps": [],
        }
        accepted_norms = [norm_f]

        k = 0
        while True:
            J = jacobian(problem, x)
            gradient = J.T @ F
            if self._converged(norm_f, gradient):
                return self._create_report(SolverStatus.CONVERGED, x, trace, start_time)
            if k >= cfg.max_iter:
                return self._create_report(
                    SolverStatus.MAX_ITERATIONS, x, trace, start_time,
                    message=f"no convergence in {cfg.max_iter} iterations"
                )

            lam = mu * norm_f ** cfg.epsilon / (1.0 + norm_f)
            # a rank-deficient J with lambda below rounding still gives the minimum-norm step
            try:
                d = lstsq(np.vstack([J, math.sqrt(lam) * eye]), np.concatenate([-F, zeros]))[0]
            except (LinAlgError, ValueError) as e:
                return self._create_report(
                    SolverStatus.LINEAR_SOLVE_FAILURE, x, trace, start_time,
                    message=f"damped least-squares solve failed: {e}"
                )
            if not np.all(np.isfinite(d)):
                return self._create_report(
                    SolverStatus.LINEAR_SOLVE_FAILURE, x, trace, start_time,
                    message="non-finite step"
                )

            x_trial = x + d
            F_trial = residual(problem, x_trial)
            norm_trial = float(norm(F_trial))
            predicted = norm_f ** 2 - float(norm(F + J @ d)) ** 2

            history = trace["residual"] if cfg.window == WindowMode.ALL else accepted_norms
            chi = min(len(history) - 1, cfg.n0)
            f_window = max(history[-(chi + 1):])

            # a nonpositive prediction only arises through rounding
            if predicted > 0.0 and math.isfinite(norm_trial):
                tau = (f_window ** 2 - norm_trial ** 2) / predicted
            else:
                tau = 0.0

            accepted = tau >= cfg.p0
            if accepted:
                x, F, norm_f = x_trial, F_trial, norm_trial
                accepted_norms.append(norm_f)

            if tau < cfg.p1:
                mu = 4.0 * mu
            elif tau > cfg.p2:
                mu = max(mu / 4.0, cfg.mu_bar)

            k += 1
            trace["residual"].append(norm_f)
            trace["accepted"].append(bool(accepted))
            trace["mu"].append(mu)
            trace["lambda"].append(float(lam))
            trace["tau"].append(float(tau))
            if cfg.record_iterates:
                trace["iterates"].append(x.tolist())
                trace["steps"].append(d.tolist())

            self.logger.debug(
                f"iter {k}: residual {norm_f:.3e} lambda {lam:.3e} mu {mu:.3e} tau {tau:.3f}"
                f"{'' if accepted else ' (rejected)'}",
                iteration=k, residual=norm_f, lam=float(lam), mu=mu, tau=float(tau), accepted=bool(accepted)
            )

            if not accepted and mu > cfg.mu_guard:
                return self._create_report(
                    SolverStatus.STALLED, x, trace, start_time,
                    message=f"mu exceeded {cfg.mu_guard:g} without an accepted step"
                )


def lm_solve(problem: GteProblem, x0, config: Optional[SolverConfig] = None) -> SolverReport:
    """Solve ``F(x) = 0`` from ``x0`` with the Levenberg-Marquardt iteration."""
    return LevenbergMarquardtSolver(config).solve(problem, x0)


def accepted_residuals(report: SolverReport) -> List[float]:
    """Residual norms at the starting point and after every accepted step."""
    history = report.residual_history
    return [history[0]] + [history[k + 1] for k, acc in enumerate(report.accepted_flags) if acc]


def envelope_history(report: SolverReport, n0: int = 5) -> List[float]:
    """``max_{0 <= j <= min(k, n0)} ||F(x_{k-j})||`` for every iterate ``k``."""
    history = report.residual_history
    return [max(history[max(0, k - n0):k + 1]) for k in range(len(history))]


def quadratic_rate_slope(report: SolverReport, floor: float = 1e-10) -> Optional[float]:
    """
    Log-log slope of the last three accepted residuals above ``floor``.

    For residuals ``r_a > r_b > r_c`` this is ``log(r_c / r_b) / log(r_b / r_a)``;
    quadratic convergence gives a slope near 2. Residuals at or below ``floor``
    sit at round-off level and are ignored. Returns None when fewer than three
    residuals remain.
    """
    tail = [r for r in accepted_residuals(report) if r > floor]
    if len(tail) < 3:
        return None
    r_a, r_b, r_c = tail[-3:]
    denom = math.log(r_b / r_a)
    if denom == 0.0:
        return None
    return math.log(r_c / r_b) / denom
