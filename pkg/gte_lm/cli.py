import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
import yaml

from . import __version__
from .bench import default_spec, format_shape, run_experiment, summarize, trace_figure, write_trace
from .classifiers import CLASS_NAMES, default_registry as default_checkers
from .exceptions import GteError
from .generators import generate, starting_point, trial_seed
from .models import GenSpec, ProblemKind, Scenario, SolverConfig, StopRule, WindowMode
from .solvers import SOLVER_NAMES, default_registry as default_solvers, quadratic_rate_slope
from .utils.config import load_config, load_environment, resolve_config_path
from .utils.io import load_problem, read_tensor, read_vector, save_problem

logger = logging.getLogger("gte_lm.cli")

KIND_CHOICES = [k.value for k in ProblemKind]
SCENARIO_CHOICES = [s.value for s in Scenario]


def _parse_ints(text: str, what: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise click.BadParameter(f"{what} must be comma-separated integers, got {text!r}") from None
    if not values:
        raise click.BadParameter(f"{what} is empty")
    return values


def _parse_shapes(text: str) -> List[Tuple[int, ...]]:
    return [_parse_ints(chunk, "shape") for chunk in text.replace(";", " ").split()]


def _emit(data: dict):
    click.echo(yaml.safe_dump(data, sort_keys=False, default_flow_style=None).rstrip())


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="YAML file of per-subcommand defaults (or set GTE_LM_CONFIG)")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on standard error")
@click.version_option(__version__, prog_name="gte-lm")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool):
    """GTE-LM: Levenberg-Marquardt for generalized tensor equations."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s | %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr
    )
    ctx.default_map = load_config(resolve_config_path(config_path))


def _parse_range(text: str) -> Tuple[float, float]:
    try:
        values = tuple(float(tok) for tok in text.replace(" ", "").split(","))
    except ValueError:
        raise click.BadParameter(f"range must be lo,hi, got {text!r}", param_hint="--range") from None
    if len(values) != 2:
        raise click.BadParameter(f"range must be lo,hi, got {text!r}", param_hint="--range")
    return values


@cli.command("generate")
@click.option("--kind", type=click.Choice(KIND_CHOICES), default=ProblemKind.MTENSOR.value, show_default=True)
@click.option("--orders", default="3", show_default=True, help="Comma-separated coefficient orders, e.g. 4,3,2")
@click.option("--dim", type=int, required=True, help="Dimension n")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sigma", type=float, default=0.1, show_default=True, help="M-tensor diagonal margin")
@click.option("--range", "entry_range", default="-5,5", show_default=True,
              help="lo,hi for uniform entries of general tensors")
@click.option("--out", "--out-dir", "out_dir", type=click.Path(file_okay=False), required=True,
              help="Directory for the manifest and tensor files")
@click.option("--name", default="problem", show_default=True, help="File name prefix")
def generate_cmd(kind: str, orders: str, dim: int, seed: int, sigma: float, entry_range: str, out_dir: str,
                 name: str) -> int:
    """Write a seeded random problem instance and its manifest."""
    spec = GenSpec(kind=ProblemKind(kind), orders=list(_parse_ints(orders, "orders")), dim=dim, seed=seed,
                   sigma=sigma, entry_range=_parse_range(entry_range))
    manifest = save_problem(out_dir, generate(spec), name=name)
    click.echo(str(manifest))
    return 0


@cli.command("solve")
@click.option("--problem", "problem_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Problem manifest (YAML)")
@click.option("--x0", "x0_mode", type=click.Choice(["ones", "planted-offset", "file"]),
              help="Starting point  [default: ones]")
@click.option("--x0-file", type=click.Path(exists=True, dir_okay=False), help="Vector file for --x0 file")
@click.option("--solver", type=click.Choice(SOLVER_NAMES), default="lm", show_default=True)
@click.option("--epsilon", type=float, help="Damping exponent in [1, 2]  [default: by problem kind]")
@click.option("--tol", type=float, help="Stopping tolerance  [default: 1e-12]")
@click.option("--max-iter", type=int, help="Iteration limit  [default: 1000]")
@click.option("--mu0", type=float)
@click.option("--n0", type=int, help="Nonmonotone window length")
@click.option("--window", type=click.Choice([w.value for w in WindowMode]))
@click.option("--stop-rule", type=click.Choice([r.value for r in StopRule]))
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the per-iteration CSV here")
@click.option("--log-json", "log_json", type=click.Path(dir_okay=False), help="Dump structured log entries here")
@click.option("--require-converged", is_flag=True, help="Exit 1 unless the solve converged")
def solve_cmd(problem_path, x0_mode, x0_file, solver, epsilon, tol, max_iter, mu0, n0, window, stop_rule,
              trace_path, log_json, require_converged) -> int:
    """Solve a problem from its manifest."""
    if x0_file and x0_mode not in (None, "file"):
        raise click.UsageError(f"--x0-file cannot be combined with --x0 {x0_mode}")
    if x0_mode == "file" and not x0_file:
        raise click.UsageError("--x0 file needs --x0-file")

    instance = load_problem(problem_path)
    if x0_file:
        x0 = read_vector(x0_file)
    else:
        x0 = starting_point(instance, x0_mode or "ones")

    config = SolverConfig.for_kind(
        instance.kind, epsilon=epsilon, tol=tol, max_iter=max_iter, mu0=mu0, n0=n0,
        window=window, stop_rule=stop_rule
    )
    runner = default_solvers(config).get_solver(solver)
    report = runner.solve(instance.problem, x0)

    if trace_path:
        write_trace(report, trace_path)
    if log_json:
        Path(log_json).parent.mkdir(parents=True, exist_ok=True)
        with open(log_json, "w", encoding="utf-8") as f:
            json.dump(runner.logger.to_records(), f, indent=2)

    out = {
        "solver": report.solver,
        "status": report.status.value,
        "iterations": report.iterations,
        "residual": report.final_residual,
    }
    if instance.omega != 1.0:
        out["unscaled_residual"] = report.final_residual * instance.omega
    out["x"] = report.final_x
    if report.message:
        out["message"] = report.message
    _emit(out)

    if require_converged and not report.converged:
        logger.warning(f"solve did not converge: {report.status.value}")
        return 1
    return 0


@cli.command("classify")
@click.option("--tensor", "tensor_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--class", "class_name", type=click.Choice(CLASS_NAMES), required=True)
@click.option("--budget", type=int, default=10_000, show_default=True, help="Random samples for sampling checkers")
@click.option("--restarts", type=int, default=20, show_default=True, help="Descent restarts for the singular search")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--refine", is_flag=True, help="Locally minimize from the best sample")
def classify_cmd(tensor_path, class_name, budget, restarts, seed, refine) -> int:
    """Check a tensor against one of the P, strong P, PD, strict PD, singular and Z+ classes."""
    A = read_tensor(tensor_path)
    checker = default_checkers().get_checker(class_name)
    report = checker.check(A, budget=budget, restarts=restarts, seed=seed, refine=refine)
    _emit(report.model_dump(mode="json", exclude_none=True))
    return 0


@cli.command("bench")
@click.option("--scenario", type=click.Choice(SCENARIO_CHOICES), required=True)
@click.option("--shapes", help="Shapes as orders...,n separated by ';', e.g. '3,20;4,50'")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--epsilon", "epsilons", type=float, multiple=True, help="Repeatable; default is the scenario grid")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, help="[default: 1e-12 for tensor equations, 1e-6 for generalized ones]")
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--full", is_flag=True, help="Include the large shapes")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="bench_out", show_default=True)
def bench_cmd(scenario, shapes, trials, epsilons, seed, tol, max_iter, full, workers, out_dir) -> int:
    """Run a batch experiment and write table.csv, table.txt, trials.json and traces."""
    spec = default_spec(
        Scenario(scenario), full=full,
        shapes=_parse_shapes(shapes) if shapes else None,
        epsilons=list(epsilons) or None,
        trials=trials, seed0=seed, tol=tol, max_iter=max_iter, workers=workers
    )
    result = run_experiment(spec)
    click.echo(summarize(result, out_dir), nl=False)

    if spec.shapes:
        trace_figure(spec.shapes[0], seed=trial_seed(seed, 0, 0, 0), kind=spec.kinds[0],
                     out_dir=out_dir, tol=spec.tol, max_iter=max_iter)
    return 0


@cli.command("trace")
@click.option("--kind", type=click.Choice(KIND_CHOICES), default=ProblemKind.MTENSOR.value, show_default=True)
@click.option("--shape", required=True, help="orders...,n, e.g. 4,50")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--epsilon", type=float)
@click.option("--tol", type=float)
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="trace_out", show_default=True)
def trace_cmd(kind, shape, seed, epsilon, tol, max_iter, out_dir) -> int:
    """Per-iteration residual traces of both solvers on one generated instance."""
    shape = _parse_ints(shape, "shape")
    if len(shape) < 2:
        raise click.BadParameter("shape needs at least one order and the dimension", param_hint="--shape")
    reports = trace_figure(shape, seed=seed, kind=ProblemKind(kind), out_dir=out_dir,
                           epsilon=epsilon, tol=tol, max_iter=max_iter)
    lm = reports["lm"]
    _emit({
        "shape": format_shape(shape),
        "lm": {"status": lm.status.value, "iterations": lm.iterations, "residual": lm.final_residual,
               "quadratic_slope": quadratic_rate_slope(lm)},
        "newton": {"status": reports["newton"].status.value, "iterations": reports["newton"].iterations,
                   "residual": reports["newton"].final_residual},
        "out_dir": str(out_dir),
    })
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point returning the exit code: 0 ok, 1 not converged, 2 argument or IO error."""
    load_environment()
    try:
        rv = cli.main(args=argv, prog_name="gte-lm", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 2
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except (GteError, OSError, ValueError, yaml.YAMLError) as e:
        click.echo(f"error: {e}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
