"""
Batch experiments: seeded trial grids over shapes, problem kinds and epsilon
values, aggregated into itr / time / resi / sr tables, plus single-instance
residual traces for the Levenberg-Marquardt solver and the Newton baseline.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .generators import generate_instance, starting_point, trial_seed
from .models import (
    BatchResult,
    BatchRow,
    ExperimentSpec,
    ProblemKind,
    Scenario,
    SolverConfig,
    SolverReport,
    TrialRecord,
)
from .problem import GteProblem
from .solvers import LevenbergMarquardtSolver, default_registry
from .utils import RunLogger

PathLike = Union[str, Path]

EPSILON_GRID = [1.0, 1.25, 1.75, 2.0]
TE_TOL = 1e-12
GTE_TOL = 1e-6

TABLE_COLUMNS = ["shape", "kind", "epsilon", "itr_mean", "time_mean_s", "resi_mean", "sr",
                 "trials", "successes", "error"]
TRACE_COLUMNS = ["iter", "residual", "lambda", "mu", "tau", "accepted"]

DESK_SHAPES = [(3, 20), (3, 50), (3, 100), (4, 50), (5, 20)]
LARGE_SHAPES = [(4, 100), (5, 50)]

_SCENARIO_DEFAULTS = {
    Scenario.TABLE1: (DESK_SHAPES, [ProblemKind.MTENSOR], EPSILON_GRID, TE_TOL),
    Scenario.TABLE2: (DESK_SHAPES, [ProblemKind.PLANTED_GENERAL], EPSILON_GRID, TE_TOL),
    Scenario.TABLE3_LMA_ONLY: (DESK_SHAPES, [ProblemKind.MTENSOR], [2.0], TE_TOL),
    Scenario.TABLE4_LMA_ONLY: (DESK_SHAPES, [ProblemKind.PLANTED_GENERAL], [1.0], TE_TOL),
    # empty epsilon grid: each kind's default
    Scenario.TABLE5: ([(4, 3, 2, 5), (4, 3, 2, 10), (4, 3, 2, 20)],
                      [ProblemKind.MTENSOR, ProblemKind.GENERAL_RANDOM], [], GTE_TOL),
}
_FULL_SHAPES = {
    Scenario.TABLE1: LARGE_SHAPES,
    Scenario.TABLE2: LARGE_SHAPES,
    Scenario.TABLE3_LMA_ONLY: LARGE_SHAPES,
    Scenario.TABLE4_LMA_ONLY: LARGE_SHAPES,
    Scenario.TABLE5: [(4, 3, 2, 50), (4, 3, 2, 100)],
}


def default_spec(scenario: Scenario, full: bool = False, **overrides) -> ExperimentSpec:
    """Shapes, kinds, epsilon grid and tolerance of a scenario; ``full`` adds the large shapes."""
    shapes, kinds, epsilons, tol = _SCENARIO_DEFAULTS[scenario]
    shapes = list(shapes) + (_FULL_SHAPES.get(scenario, []) if full else [])
    settings = dict(scenario=scenario, shapes=shapes, kinds=list(kinds), epsilons=list(epsilons), tol=tol, full=full)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentSpec(**settings)


def format_shape(shape: Sequence[int]) -> str:
    return "(" + ",".join(str(int(v)) for v in shape) + ")"


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


class ExperimentRunner:
    """Runs every (shape, kind, epsilon, trial) cell of an experiment."""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.logger = RunLogger("bench")

    def _cells(self) -> List[Tuple[int, Tuple[int, ...], int, ProblemKind, Optional[float], int]]:
        epsilons = self.spec.epsilons or [None]
        return [
            (shape_idx, tuple(shape), kind_idx, kind, eps, trial)
            for shape_idx, shape in enumerate(self.spec.shapes)
            for kind_idx, kind in enumerate(self.spec.kinds)
            for eps in epsilons
            for trial in range(self.spec.trials)
        ]

    def run_trial(self, shape_idx: int, shape: Tuple[int, ...], kind_idx: int, kind: ProblemKind,
                  epsilon: Optional[float], trial: int) -> TrialRecord:
        """One seeded instance, solved from the kind's prescribed starting point."""
        seed = trial_seed(self.spec.seed0, shape_idx, kind_idx, trial)
        instance = generate_instance(shape[:-1], shape[-1], kind, seed)
        x0 = starting_point(instance, "ones" if kind == ProblemKind.MTENSOR else "planted-offset")
        config = SolverConfig.for_kind(
            kind, epsilon=epsilon, tol=self.spec.tol, max_iter=self.spec.max_iter, record_iterates=False
        )
        report = LevenbergMarquardtSolver(config).solve(instance.problem, x0)
        success = report.converged and report.final_residual <= self.spec.tol

        self.logger.info(
            f"{format_shape(shape)} {kind.value} eps={config.epsilon:g} trial {trial}: "
            f"{report.status.value} in {report.iterations} iterations",
            shape=list(shape), kind=kind.value, epsilon=config.epsilon, trial=trial,
            iterations=report.iterations, residual=report.final_residual
        )
        return TrialRecord(
            shape=shape,
            kind=kind,
            epsilon=config.epsilon,
            trial=trial,
            iterations=report.iterations,
            wall_time=report.wall_time,
            residual=report.final_residual,
            status=report.status,
            success=success,
        )

    def run(self) -> BatchResult:
        cells = self._cells()
        if self.spec.workers > 1:
            with ThreadPoolExecutor(max_workers=self.spec.workers) as pool:
                records = list(pool.map(lambda cell: self.run_trial(*cell), cells))
        else:
            records = [self.run_trial(*cell) for cell in cells]
        return BatchResult(spec=self.spec, rows=aggregate(self.spec, records), records=records)


def run_experiment(spec: ExperimentSpec) -> BatchResult:
    return ExperimentRunner(spec).run()


def _row(shape: str, kind: str, epsilon: Optional[float], records: List[TrialRecord]) -> BatchRow:
    if not records:
        return BatchRow(shape=shape, kind=kind, epsilon=epsilon, error="no trials")
    successes = [r for r in records if r.success]
    return BatchRow(
        shape=shape,
        kind=kind,
        epsilon=epsilon,
        trials=len(records),
        successes=len(successes),
        itr_mean=_mean([r.iterations for r in records]),
        time_mean_s=_mean([r.wall_time for r in records]),
        # failures are excluded from the residual mean
        resi_mean=_mean([r.residual for r in successes]),
        sr=len(successes) / len(records),
    )


def aggregate(spec: ExperimentSpec, records: List[TrialRecord]) -> List[BatchRow]:
    """One row per (shape, kind, epsilon) cell in spec order, independent of record order."""
    groups: Dict[Tuple[str, str, Optional[float]], List[TrialRecord]] = {}
    for rec in sorted(records, key=lambda r: (r.trial, r.epsilon)):
        groups.setdefault((format_shape(rec.shape), rec.kind.value, rec.epsilon), []).append(rec)

    rows = []
    for shape in spec.shapes:
        for kind in spec.kinds:
            if spec.epsilons:
                epsilons = spec.epsilons
            else:
                epsilons = [SolverConfig.for_kind(kind).epsilon]
            for eps in epsilons:
                key = (format_shape(shape), kind.value, float(eps))
                rows.append(_row(key[0], key[1], key[2], groups.get(key, [])))
    if not rows:
        rows.append(_row("-", "-", None, []))
    return rows


def _table_frame(rows: List[BatchRow]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in rows], columns=TABLE_COLUMNS)


def _cell(value: Optional[float], fmt: str) -> str:
    return "-" if value is None or (isinstance(value, float) and math.isnan(value)) else format(value, fmt)


def format_table(result: BatchResult) -> str:
    """Plain-text table in ``itr / time / resi / sr`` layout."""
    lines = [f"{result.spec.scenario.value}: {result.spec.trials} trial(s) per cell, tol {result.spec.tol:g}", ""]
    header = f"{'shape':<14} {'kind':<15} {'eps':>5}  {'itr / time / resi / sr':<40}"
    lines += [header, "-" * len(header)]
    for row in result.rows:
        if row.error:
            lines.append(f"{row.shape:<14} {row.kind:<15} {_cell(row.epsilon, '5.2f'):>5}  {row.error}")
            continue
        cells = " / ".join([
            _cell(row.itr_mean, ".2f"),
            _cell(row.time_mean_s, ".2f"),
            _cell(row.resi_mean, ".2e"),
            _cell(row.sr, ".2f"),
        ])
        lines.append(f"{row.shape:<14} {row.kind:<15} {row.epsilon:>5.2f}  {cells}")
    return "\n".join(lines) + "\n"


def summarize(result: BatchResult, out_dir: PathLike) -> str:
    """Write ``table.csv``, ``table.txt`` and ``trials.json``; returns the text table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    _table_frame(result.rows).to_csv(out_dir / "table.csv", index=False)
    text = format_table(result)
    (out_dir / "table.txt").write_text(text, encoding="utf-8")
    with open(out_dir / "trials.json", "w", encoding="utf-8") as f:
        json.dump(result.model_dump(mode="json", include={"spec", "records"}), f, indent=2)
    return text


def load_table(path: PathLike) -> List[BatchRow]:
    """Rows of a ``table.csv`` written by :func:`summarize`."""
    df = pd.read_csv(path, dtype={"shape": str, "kind": str, "error": str}, float_precision="round_trip")
    df = df.astype(object).where(pd.notna(df), None)
    return [BatchRow(**record) for record in df.to_dict(orient="records")]


def _trace_frame(report: SolverReport) -> pd.DataFrame:
    n = report.iterations + 1

    def padded(values):
        return list(values) + [None] * (n - len(values))

    return pd.DataFrame({
        "iter": range(n),
        "residual": report.residual_history,
        "lambda": padded(report.lambda_history),
        "mu": padded(report.mu_history),
        "tau": padded(report.tau_history),
        "accepted": padded(report.accepted_flags),
    }, columns=TRACE_COLUMNS)


def write_trace(report: SolverReport, path: PathLike) -> Path:
    """Per-iteration CSV; the row of the final iterate has no lambda, tau or accepted entry."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _trace_frame(report).to_csv(path, index=False)
    return path


def trace_problem(problem: GteProblem, x0, out_dir: Optional[PathLike] = None,
                  config: Optional[SolverConfig] = None, label: str = "") -> Dict[str, SolverReport]:
    """Run both solvers from ``x0``; with ``out_dir``, write ``trace_lm{label}.csv`` and ``trace_newton{label}.csv``."""
    registry = default_registry(config)
    reports = {key: registry.get_solver(key).solve(problem, x0) for key in registry.list_solvers()}
    if out_dir is not None:
        for key, report in reports.items():
            write_trace(report, Path(out_dir) / f"trace_{key}{label}.csv")
    return reports


def trace_figure(shape: Sequence[int], seed: int = 0, kind: ProblemKind = ProblemKind.MTENSOR,
                 out_dir: Optional[PathLike] = None, epsilon: Optional[float] = None,
                 tol: Optional[float] = None, max_iter: int = 1000) -> Dict[str, SolverReport]:
    """Residual traces of both solvers on one generated instance of ``shape = (orders..., n)``."""
    shape = tuple(int(v) for v in shape)
    instance = generate_instance(shape[:-1], shape[-1], kind, seed)
    x0 = starting_point(instance, "ones" if kind == ProblemKind.MTENSOR else "planted-offset")
    if tol is None:
        tol = TE_TOL if len(shape) == 2 else GTE_TOL
    config = SolverConfig.for_kind(kind, epsilon=epsilon, tol=tol, max_iter=max_iter)
    return trace_problem(instance.problem, x0, out_dir, config)
