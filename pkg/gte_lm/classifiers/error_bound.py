"""
Sampled check of a local error bound on a problem with a singular Jacobian.

The order-4, dim-2 tensor below has ``A x^3 = ((x_1 + x_2)^3, 2 (x_1 + x_2)^3)``
and ``b = (1, 2)``, so ``W(x) = A x^3 - b`` vanishes exactly on the line
``X = {x_1 + x_2 = 1}`` while ``W'(x)`` is singular everywhere. On the strip
``N = {|x_1 + x_2 - 1| <= 1/2}`` the bound ``||W(x)|| >= c dist(x, X)`` holds
with ``c = 5 sqrt(10) / 4``.
"""

import math

import numpy as np

from ..generators import SeedLike, make_rng
from ..models import ErrorBoundReport
from ..problem import GteProblem
from ..tensor import DenseTensor, contract_batch
from ..utils import RunLogger

SINGULAR_CUBE_ENTRIES = (1.0, 3.0, 0.0, 3.0, 0.0, 0.0, 0.0, 1.0,
                         2.0, 6.0, 0.0, 6.0, 0.0, 0.0, 0.0, 2.0)
ERROR_BOUND_CONSTANT = 5.0 * math.sqrt(10.0) / 4.0

logger = RunLogger("error_bound")


def singular_cube_problem() -> GteProblem:
    return GteProblem((DenseTensor(4, 2, np.array(SINGULAR_CUBE_ENTRIES)),), np.array([1.0, 2.0]))


def verify_error_bound_example(samples: int = 100_000, seed: SeedLike = 0, width: float = 5.0,
                               slack: float = 1e-12) -> ErrorBoundReport:
    """
    Sample ``N`` and count points where ``||W(x)|| < c dist(x, X) - slack``.

    ``x_1 + x_2`` is uniform on [1/2, 3/2] and the coordinate along ``X`` is
    uniform on ``[-width, width]``. The points ``(1, 0)`` and ``(1.25, 0.25)``
    are always included.
    """
    problem = singular_cube_problem()
    rng = make_rng(seed)

    sums = rng.uniform(0.5, 1.5, samples)
    along = rng.uniform(-width, width, samples)
    pts = np.column_stack([(sums + along) / 2.0, (sums - along) / 2.0])
    pts = np.vstack([[[1.0, 0.0], [1.25, 0.25]], pts])

    dist = np.abs(pts.sum(axis=1) - 1.0) / math.sqrt(2.0)
    w_norm = np.linalg.norm(contract_batch(problem.coeffs[0], pts) - problem.rhs, axis=1)

    gap = ERROR_BOUND_CONSTANT * dist - w_norm
    off_line = dist > 0.0
    ratios = w_norm[off_line] / dist[off_line]

    report = ErrorBoundReport(
        samples=int(pts.shape[0]),
        constant=ERROR_BOUND_CONSTANT,
        violations=int(np.count_nonzero(gap > slack)),
        max_violation=float(max(gap.max(), 0.0)),
        min_ratio=float(ratios.min()) if ratios.size else math.inf,
    )
    logger.info(
        f"error bound: {report.violations} violations in {report.samples} samples, min ratio {report.min_ratio:.6g}",
        **report.model_dump()
    )
    return report
