"""
Tests for the Levenberg-Marquardt solver and the Newton baseline.
"""

import numpy as np
import pytest
from numpy.linalg import LinAlgError
from pydantic import ValidationError

import gte_lm.solvers.levenberg_marquardt as lm_module
from gte_lm.classifiers import singular_cube_problem
from gte_lm.generators import generate_instance, starting_point
from gte_lm.models import ProblemKind, SolverConfig, SolverStatus, StopRule, WindowMode
from gte_lm.problem import GteProblem, jacobian, residual, scale
from gte_lm.solvers import (
    SOLVER_NAMES,
    LevenbergMarquardtSolver,
    accepted_residuals,
    default_registry,
    envelope_history,
    lm_solve,
    newton_solve,
    quadratic_rate_slope,
)
from gte_lm.tensor import DenseTensor
from gte_lm.utils.io import load_problem


def linear_problem(seed=0, dim=5):
    rng = np.random.default_rng(seed)
    M = 4.0 * np.eye(dim) + 0.5 * rng.uniform(-1.0, 1.0, (dim, dim))
    x_true = rng.uniform(-1.0, 1.0, dim)
    return GteProblem((DenseTensor.from_array(M),), M @ x_true), x_true


# --- configuration ---

def test_default_config():
    cfg = SolverConfig()
    assert (cfg.mu0, cfg.mu_bar, cfg.p0, cfg.p1, cfg.p2, cfg.n0) == (1.0, 1e-8, 1e-4, 0.25, 0.75, 5)
    assert cfg.stop_rule == StopRule.RESIDUAL_NORM
    assert cfg.window == WindowMode.ALL


@pytest.mark.parametrize("kwargs", [
    dict(epsilon=0.5),
    dict(epsilon=2.5),
    dict(mu0=1e-9),
    dict(p0=0.5, p1=0.25),
    dict(p1=0.8, p2=0.75),
    dict(p2=1.0),
    dict(n0=0),
    dict(max_iter=0),
    dict(unknown=1),
])
def test_invalid_config_rejected(kwargs):
    with pytest.raises(ValidationError):
        SolverConfig(**kwargs)


def test_epsilon_defaults_by_kind():
    assert SolverConfig.for_kind(ProblemKind.MTENSOR).epsilon == 2.0
    assert SolverConfig.for_kind(ProblemKind.PLANTED_GENERAL).epsilon == 1.0
    assert SolverConfig.for_kind(ProblemKind.GENERAL_RANDOM, epsilon=1.25).epsilon == 1.25
    assert SolverConfig.for_kind(None, tol=None).tol == 1e-12


# --- Levenberg-Marquardt ---

def test_linear_problem_converges():
    P, x_true = linear_problem()
    report = lm_solve(P, np.zeros(5), SolverConfig())
    assert report.status == SolverStatus.CONVERGED
    assert report.iterations <= 25
    assert report.final_residual <= 1e-12
    np.testing.assert_allclose(report.final_x, x_true, atol=1e-10)


def test_report_shape_invariants():
    P, _ = linear_problem(1)
    report = lm_solve(P, np.zeros(5))
    assert len(report.residual_history) == report.iterations + 1
    assert len(report.accepted_flags) == report.iterations
    assert len(report.lambda_history) == len(report.tau_history) == report.iterations
    assert len(report.mu_history) == report.iterations + 1
    assert len(report.iterates) == report.iterations + 1
    assert report.converged and report.final_residual <= 1e-12
    assert report.wall_time >= 0.0


def test_gradient_norm_stop_rule():
    P, _ = linear_problem(2)
    report = lm_solve(P, np.zeros(5), SolverConfig(stop_rule=StopRule.GRADIENT_NORM, tol=1e-10))
    assert report.converged
    x = np.array(report.final_x)
    assert np.linalg.norm(jacobian(P, x).T @ residual(P, x)) <= 1e-10
    assert report.final_residual <= 1e-10


def test_gradient_norm_rule_needs_small_residual_too():
    # x^2 + 1 = 0 has a stationary point at 0 but no real root
    P = GteProblem((DenseTensor.from_array(np.ones((1, 1, 1))),), np.array([-1.0]))
    report = lm_solve(P, np.zeros(1), SolverConfig(stop_rule=StopRule.GRADIENT_NORM))
    assert report.status == SolverStatus.STALLED
    assert report.final_residual == 1.0


def test_gradient_norm_rule_on_singular_jacobian():
    # ||J^T F|| shrinks like ||F||^(5/3) here, well before ||F|| reaches tol
    cfg = SolverConfig(stop_rule=StopRule.GRADIENT_NORM, epsilon=2.0, tol=1e-12)
    report = lm_solve(singular_cube_problem(), np.array([1.0, 1.0]), cfg)
    assert report.status == SolverStatus.CONVERGED
    assert report.residual_history[-1] <= 1e-12


def test_two_solution_problem_converges_near_start(fixtures_dir):
    instance = load_problem(fixtures_dir / "pd_multiple_roots_b6.yaml")
    report = lm_solve(instance.problem, np.array([1.8, 2.0]))
    assert report.converged
    x1, x2 = report.final_x
    assert x2 == pytest.approx(2.0, abs=1e-10)
    assert abs(2 * x1 ** 3 - 6 * x1 + 2) <= 1e-10
    assert x1 > 0.0


def test_single_solution_right_hand_side(fixtures_dir):
    instance = load_problem(fixtures_dir / "pd_multiple_roots_b2.yaml")
    report = lm_solve(instance.problem, np.array([-2.0, 2.0]))
    assert report.converged
    x1, x2 = report.final_x
    real = [r.real for r in np.roots([2.0, 0.0, -6.0, 6.0]) if abs(r.imag) < 1e-9]
    assert len(real) == 1
    assert x1 == pytest.approx(real[0], abs=1e-10)
    assert x2 == pytest.approx(2.0, abs=1e-10)


def test_singular_jacobian_problem_still_converges(singular_cube_instance):
    report = lm_solve(singular_cube_instance.problem, np.array([1.0, 1.0]))
    assert report.converged
    assert abs(sum(report.final_x) - 1.0) <= 1e-10


@pytest.mark.parametrize("x0", [(1.0, 1.0), (3.0, 0.0), (2.0, -5.0)])
@pytest.mark.parametrize("epsilon", [1.0, 2.0])
def test_rank_deficient_jacobian_converges_below_rounding_damping(x0, epsilon):
    # lambda ends far below eps * ||J^T J|| while J keeps rank one
    problem = singular_cube_problem()
    report = lm_solve(problem, np.array(x0), SolverConfig(epsilon=epsilon, tol=1e-12))
    assert report.status == SolverStatus.CONVERGED
    assert report.final_residual <= 1e-12
    assert abs(sum(report.final_x) - 1.0) <= 1e-10
    assert abs(np.linalg.det(jacobian(problem, np.array(report.final_x)))) <= 1e-10


def test_quadratic_rate_on_m_tensor_instances():
    slopes = []
    for seed in range(20):
        instance = generate_instance((3,), 20, ProblemKind.MTENSOR, seed)
        report = lm_solve(instance.problem, starting_point(instance), SolverConfig(epsilon=2.0))
        assert report.converged
        slopes.append(quadratic_rate_slope(report))
    assert all(s is not None and s >= 1.7 for s in slopes), slopes


def test_stalls_when_no_step_helps():
    # J = 0: every step is zero and every ratio is rejected
    P = GteProblem((DenseTensor.zeros(2, 3),), np.ones(3))
    report = lm_solve(P, np.zeros(3))
    assert report.status == SolverStatus.STALLED
    assert not any(report.accepted_flags)
    assert report.mu_history[-1] > 1e40


def test_max_iterations():
    instance = generate_instance((3,), 10, ProblemKind.MTENSOR, 0)
    report = lm_solve(instance.problem, starting_point(instance), SolverConfig(max_iter=2))
    assert report.status == SolverStatus.MAX_ITERATIONS
    assert report.iterations == 2


def test_linear_solve_failure_reported(monkeypatch):
    def broken(*args, **kwargs):
        raise LinAlgError("SVD did not converge")

    monkeypatch.setattr(lm_module, "lstsq", broken)
    P, _ = linear_problem()
    report = lm_solve(P, np.zeros(5))
    assert report.status == SolverStatus.LINEAR_SOLVE_FAILURE
    assert report.iterations == 0


def test_non_finite_start_is_a_linear_solve_failure():
    P, _ = linear_problem()
    report = lm_solve(P, np.array([np.nan, 0.0, 0.0, 0.0, 0.0]))
    assert report.status == SolverStatus.LINEAR_SOLVE_FAILURE
    assert not report.converged


def test_iteration_logging():
    P, _ = linear_problem()
    solver = LevenbergMarquardtSolver()
    report = solver.solve(P, np.zeros(5))
    entries = solver.logger.entries
    assert sum(e.level == "DEBUG" for e in entries) == report.iterations
    assert entries[-1].level == "INFO"
    assert entries[-1].metadata["status"] == "Converged"

    # each solve starts a fresh record list
    solver.solve(P, np.zeros(5))
    records = solver.logger.to_records()
    assert len(records) == len(entries)
    assert records[-1]["source"] == "levenberg_marquardt"
    assert records[0]["metadata"]["iteration"] == 1


def test_determinism():
    instance = generate_instance((4, 3, 2), 6, ProblemKind.PLANTED_GENERAL, 12)
    x0 = starting_point(instance, "planted-offset")
    cfg = SolverConfig.for_kind(instance.kind, tol=1e-6)
    assert lm_solve(instance.problem, x0, cfg).numeric_content() == lm_solve(instance.problem, x0, cfg).numeric_content()


def test_scaled_root_solves_unscaled_problem():
    rng = np.random.default_rng(8)
    coeffs = tuple(DenseTensor.from_array(rng.uniform(-5, 5, (4,) * m)) for m in (3, 2))
    x_star = rng.random(4)
    P = GteProblem.planted(coeffs, x_star)
    S, omega = scale(P)
    report = lm_solve(S, x_star + 0.1, SolverConfig(epsilon=1.0))
    assert report.converged
    assert np.linalg.norm(residual(P, np.array(report.final_x))) <= 1e-12 * omega * 10


def test_accepted_only_window():
    instance = generate_instance((3,), 10, ProblemKind.PLANTED_GENERAL, 2)
    cfg = SolverConfig(epsilon=1.0, window=WindowMode.ACCEPTED)
    report = lm_solve(instance.problem, starting_point(instance, "planted-offset"), cfg)
    assert report.status != SolverStatus.LINEAR_SOLVE_FAILURE
    assert len(report.residual_history) == report.iterations + 1

    accepted = accepted_residuals(report)
    for k in range(1, len(accepted)):
        assert accepted[k] < max(accepted[max(0, k - 1 - cfg.n0):k])


def _check_iteration_invariants(P, report, cfg):
    assert all(mu >= cfg.mu_bar for mu in report.mu_history)

    for k, accepted in enumerate(report.accepted_flags):
        if not accepted:
            assert report.iterates[k + 1] == report.iterates[k]
            assert report.residual_history[k + 1] == report.residual_history[k]

    envelope = envelope_history(report, cfg.n0)
    assert all(b <= a for a, b in zip(envelope, envelope[1:]))
    accepted = accepted_residuals(report)
    assert all(r <= envelope[0] for r in accepted)

    for k, d in enumerate(report.steps):
        x = np.array(report.iterates[k])
        d = np.array(d)
        g = jacobian(P, x).T @ residual(P, x)
        assert g @ d <= 1e-14 * np.linalg.norm(g) * np.linalg.norm(d)

    for lam, r in zip(report.lambda_history, report.residual_history):
        if r > 0.0:
            assert lam > 0.0


def test_algorithm_state_invariants():
    total = 0
    seed = 0
    while total < 1000 and seed < 200:
        kind = (ProblemKind.PLANTED_GENERAL, ProblemKind.MTENSOR)[seed % 2]
        orders = ((3,), (4, 3, 2), (4,))[seed % 3]
        instance = generate_instance(orders, 4 + seed % 5, kind, seed)
        cfg = SolverConfig.for_kind(kind, tol=1e-12, max_iter=150)
        x0 = starting_point(instance) * (1.0 + seed % 4)
        report = lm_solve(instance.problem, x0, cfg)
        _check_iteration_invariants(instance.problem, report, cfg)
        total += report.iterations
        seed += 1
    assert total >= 1000


# --- Newton baseline ---

def test_newton_linear_one_step():
    P, x_true = linear_problem(3)
    report = newton_solve(P, np.zeros(5))
    assert report.converged
    assert report.iterations == 1
    np.testing.assert_allclose(report.final_x, x_true, atol=1e-12)


def test_newton_singular_jacobian(singular_cube_instance):
    for x0 in ([1.0, 1.0], [0.3, -2.0], [2.0, 5.0]):
        report = newton_solve(singular_cube_instance.problem, np.array(x0))
        assert report.status == SolverStatus.LINEAR_SOLVE_FAILURE
        assert report.iterations == 0


def test_newton_tracks_lm_on_m_tensor():
    instance = generate_instance((3,), 20, ProblemKind.MTENSOR, 0)
    x0 = starting_point(instance)
    lm = lm_solve(instance.problem, x0)
    newton = newton_solve(instance.problem, x0)
    assert newton.converged
    assert abs(newton.iterations - lm.iterations) <= 5


def test_default_registry():
    config = SolverConfig(tol=1e-9, max_iter=7)
    registry = default_registry(config)
    assert registry.list_solvers() == list(SOLVER_NAMES)
    assert isinstance(registry.get_solver("lm"), LevenbergMarquardtSolver)
    assert registry.get_solver("lm").config is config
    newton = registry.get_solver("newton")
    assert (newton.name, newton.tol, newton.max_iter) == ("newton", 1e-9, 7)
    assert registry.get_solver("nope") is None
