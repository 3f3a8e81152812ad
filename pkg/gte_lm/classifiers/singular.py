"""
Search for a nonzero ``x`` with ``A x^{m-1} = 0``.

Minimizes ``g(x) = ||A x^{m-1}||^2`` over the unit sphere: the sign grid is
scanned first, then a multistart projected gradient descent with Armijo
backtracking runs from random unit vectors.
"""

import numpy as np

from .base import BaseChecker
from .sampling import sign_grid
from ..generators import SeedLike, make_rng
from ..models import CheckMethod, ClassReport, Verdict
from ..tensor import DenseTensor, contract_batch, contract_to_matrix, contract_to_vector, semi_symmetrize

SINGULAR_TOL = 1e-10


class SingularChecker(BaseChecker):
    """Reports Falsified (singular) with a kernel direction, or Inconclusive."""

    def __init__(self, max_steps: int = 500):
        super().__init__(name="singular", description="singular tensor search")
        self.max_steps = max_steps

    def _descend(self, A: DenseTensor, x: np.ndarray, tol: float):
        scale = A.order - 1
        r = contract_to_vector(A, x)
        g = float(r @ r)
        step = 1.0
        evals = 1
        for _ in range(self.max_steps):
            if g <= tol:
                break
            grad = 2.0 * scale * contract_to_matrix(A, x).T @ r
            pg = grad - (grad @ x) * x
            slope = float(pg @ pg)
            if slope <= 1e-30:
                break
            while step > 1e-16:
                trial = x - step * pg
                trial /= np.linalg.norm(trial)
                r_trial = contract_to_vector(A, trial)
                g_trial = float(r_trial @ r_trial)
                evals += 1
                if g_trial <= g - 1e-4 * step * slope:
                    break
                step /= 2.0
            else:
                break
            x, r, g = trial, r_trial, g_trial
            step *= 2.0
        return x, g, evals

    def check(self, A: DenseTensor, restarts: int = 20, seed: SeedLike = 0,
              tol: float = SINGULAR_TOL, **options) -> ClassReport:
        if restarts < 0:
            raise ValueError(f"restarts must be >= 0, got {restarts}")
        # the gradient formula needs symmetric trailing indices
        A = semi_symmetrize(A)

        used = 0
        best_x, best_g = None, np.inf
        grid = sign_grid(A.dim)
        if grid.shape[0]:
            values = np.sum(contract_batch(A, grid) ** 2, axis=1)
            used += grid.shape[0]
            i = int(np.argmin(values))
            best_x, best_g = grid[i], float(values[i])
            if best_g <= tol:
                return self._singular(best_x, best_g, used, CheckMethod.SAMPLING)

        rng = make_rng(seed)
        for _ in range(restarts):
            x0 = rng.standard_normal(A.dim)
            x, g, evals = self._descend(A, x0 / np.linalg.norm(x0), tol)
            used += evals
            if g < best_g:
                best_x, best_g = x, g
            if g <= tol:
                return self._singular(x, g, used, CheckMethod.OPTIMIZATION)

        return self._create_report(
            Verdict.INCONCLUSIVE,
            CheckMethod.OPTIMIZATION if restarts else CheckMethod.SAMPLING,
            samples_used=used,
            witness_value=best_g,
            message=f"no singular direction found; min ||A x^(m-1)||^2 on the sphere {best_g:.6g}"
        )

    def _singular(self, x, g, used, method) -> ClassReport:
        return self._create_report(
            Verdict.FALSIFIED,
            method,
            samples_used=used,
            witness=x,
            witness_value=g,
            message=f"singular: ||A x^(m-1)||^2 = {g:.3e} at a unit vector"
        )


def check_singular(A: DenseTensor, restarts: int = 20, seed: SeedLike = 0, **options) -> ClassReport:
    """Falsified means singular, with the kernel direction as witness."""
    return SingularChecker().check(A, restarts=restarts, seed=seed, **options)
