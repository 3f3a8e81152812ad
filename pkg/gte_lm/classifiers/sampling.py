"""
Sampling falsifiers for the P, strong P, positive definite and strictly
positive definite tensor classes.

Each class is defined by a strict inequality over all of R^n (or all pairs
x != y), so sampling can only ever falsify. P for ``n = 2`` also has an exact
test that can prove it. A checker evaluates, in order:

1. explicit candidates, exactly as given;
2. every point of the {-1, 0, 1}^n sign grid, normalized (n <= 10);
3. ``budget`` normalized standard-normal draws, in batches.

The first point whose value is ``<= falsify_tol`` is returned as the witness.
Pairwise classes use pairs ``(x, y = x - u)`` with ``u`` a unit vector.
"""

import itertools
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .base import FALSIFY_TOL, BaseChecker
from .zplus import p_test_directions
from ..generators import SeedLike, make_rng
from ..models import CheckMethod, ClassReport, Verdict
from ..tensor import DenseTensor, _as_vector, contract_batch

GRID_MAX_DIM = 10
BATCH_SIZE = 4096

Stage = Tuple[np.ndarray, ...]


def sign_grid(dim: int) -> np.ndarray:
    """The ``3^n - 1`` nonzero points of ``{-1, 0, 1}^n``, scaled to unit norm."""
    if dim > GRID_MAX_DIM:
        return np.empty((0, dim))
    pts = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=dim)))
    pts = pts[np.any(pts != 0.0, axis=1)]
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _unit_rows(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


class SamplingChecker(BaseChecker):
    """Shared sampling loop; subclasses define the value of the defining inequality."""

    pairwise = False
    antipodal = False

    def _values(self, A: DenseTensor, X: np.ndarray, Y: Optional[np.ndarray] = None) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, A: DenseTensor, x, y=None) -> float:
        """Value of the defining inequality at one point (or pair)."""
        X = _as_vector(x, A.dim)[None, :]
        Y = None if y is None else _as_vector(y, A.dim)[None, :]
        return float(self._values(A, X, Y)[0])

    def _candidate_stage(self, A: DenseTensor, candidates) -> Stage:
        if self.pairwise:
            pairs = [(_as_vector(x, A.dim), _as_vector(y, A.dim)) for x, y in candidates]
            if any(np.array_equal(x, y) for x, y in pairs):
                raise ValueError("candidate pairs must have x != y")
            return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])

        pts = [_as_vector(x, A.dim) for x in candidates]
        if any(not np.any(x) for x in pts):
            raise ValueError("candidate vectors must be nonzero")
        return (np.array(pts),)

    def _grid_stage(self, dim: int) -> Stage:
        grid = sign_grid(dim)
        if not self.pairwise:
            return (grid,)
        # (g, 0) and (g/2, -g/2): both differences are g itself
        return np.vstack([grid, grid / 2.0]), np.vstack([np.zeros_like(grid), -grid / 2.0])

    def _random_stages(self, dim: int, budget: int, seed: SeedLike) -> Iterator[Stage]:
        rng = make_rng(seed)
        remaining = budget
        while remaining > 0:
            k = min(BATCH_SIZE, remaining)
            remaining -= k
            if self.pairwise:
                X = rng.standard_normal((k, dim))
                U = _unit_rows(rng.standard_normal((k, dim)))
                yield X, X - U
            else:
                X = _unit_rows(rng.standard_normal((k, dim)))
                if self.antipodal:
                    X = np.vstack([X, -X])
                yield (X,)

    def _refine(self, A: DenseTensor, start: Stage) -> Tuple[float, Stage, int]:
        """Local minimization of the value from the best sampled point."""
        if self.pairwise:
            x0, y0 = start[0][0], start[1][0]
            n = A.dim

            def split(z):
                x, u = z[:n], z[n:]
                return x, x - u / np.linalg.norm(u)

            def objective(z):
                if not np.any(z[n:]):
                    return np.inf
                x, y = split(z)
                return self.evaluate(A, x, y)

            res = minimize(objective, np.concatenate([x0, x0 - y0]), method="Nelder-Mead",
                           options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-15})
            x, y = split(res.x)
            return float(res.fun), (x[None, :], y[None, :]), int(res.nfev)

        def objective(z):
            nz = np.linalg.norm(z)
            return np.inf if nz == 0.0 else self.evaluate(A, z / nz)

        res = minimize(objective, start[0][0], method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-15})
        x = res.x / np.linalg.norm(res.x)
        return float(res.fun), (x[None, :],), int(res.nfev)

    def _falsified(self, stage: Stage, index: int, value: float, used: int, method: CheckMethod) -> ClassReport:
        return self._create_report(
            Verdict.FALSIFIED,
            method,
            samples_used=used,
            witness=stage[0][index],
            witness_pair=stage[1][index] if self.pairwise else None,
            witness_value=value,
            message=f"{self.description} violated: value {value:.6g}"
        )

    def check(
        self,
        A: DenseTensor,
        budget: int = 10_000,
        seed: SeedLike = 0,
        candidates: Optional[Sequence] = None,
        falsify_tol: float = FALSIFY_TOL,
        refine: bool = False,
        **options
    ) -> ClassReport:
        if budget < 1:
            raise ValueError(f"budget must be >= 1, got {budget}")

        stages: List[Iterator[Stage]] = []
        if candidates:
            stages.append(iter([self._candidate_stage(A, candidates)]))
        stages.append(iter([self._grid_stage(A.dim)]))
        stages.append(self._random_stages(A.dim, budget, seed))

        used = 0
        best_value = np.inf
        best: Optional[Stage] = None
        for stage in itertools.chain.from_iterable(stages):
            if stage[0].shape[0] == 0:
                continue
            values = self._values(A, *stage)
            hits = np.flatnonzero(values <= falsify_tol)
            if hits.size:
                i = int(hits[0])
                return self._falsified(stage, i, float(values[i]), used + i + 1, CheckMethod.SAMPLING)
            used += values.shape[0]
            i = int(np.argmin(values))
            if values[i] < best_value:
                best_value = float(values[i])
                best = tuple(arr[i:i + 1] for arr in stage)

        if refine and best is not None:
            value, point, nfev = self._refine(A, best)
            used += nfev
            if value <= falsify_tol:
                return self._falsified(point, 0, value, used, CheckMethod.OPTIMIZATION)
            best_value = min(best_value, value)

        return self._create_report(
            Verdict.INCONCLUSIVE,
            CheckMethod.OPTIMIZATION if refine else CheckMethod.SAMPLING,
            samples_used=used,
            witness_value=best_value,
            message=f"no counterexample in {used} samples; smallest value {best_value:.6g}"
        )


class PTensorChecker(SamplingChecker):
    """
    ``max_i x_i (A x^{m-1})_i > 0`` for every nonzero ``x``.

    For ``n = 2`` a sampling run that finds nothing is followed by the exact
    test in :func:`p_test_directions`, which ends in Holds or Falsified.
    """

    def __init__(self):
        super().__init__(name="p", description="P-tensor condition")

    def _values(self, A, X, Y=None):
        return np.max(X * contract_batch(A, X), axis=1)

    def check(self, A: DenseTensor, falsify_tol: float = FALSIFY_TOL, **options) -> ClassReport:
        report = super().check(A, falsify_tol=falsify_tol, **options)
        if A.dim != 2 or report.verdict != Verdict.INCONCLUSIVE:
            return report

        dirs = np.array(p_test_directions(A))
        X = np.vstack([dirs, -dirs])
        values = self._values(A, X)
        used = report.samples_used + X.shape[0]
        hits = np.flatnonzero(values <= falsify_tol)
        if hits.size:
            i = int(hits[0])
            return self._falsified((X,), i, float(values[i]), used, CheckMethod.EXACT_2D)
        return self._create_report(
            Verdict.HOLDS,
            CheckMethod.EXACT_2D,
            samples_used=used,
            message=f"positive at all {X.shape[0]} sign-change test points"
        )


class StrongPChecker(SamplingChecker):
    """``max_i (x_i - y_i)(A x^{m-1} - A y^{m-1})_i > 0`` for every ``x != y``."""

    pairwise = True

    def __init__(self):
        super().__init__(name="strong-p", description="strong P-tensor condition")

    def _values(self, A, X, Y=None):
        return np.max((X - Y) * (contract_batch(A, X) - contract_batch(A, Y)), axis=1)


class PDChecker(SamplingChecker):
    """``A x^m > 0`` for every nonzero ``x``."""

    antipodal = True

    def __init__(self):
        super().__init__(name="pd", description="positive definiteness")

    def _values(self, A, X, Y=None):
        return np.sum(X * contract_batch(A, X), axis=1)


class StrictPDChecker(SamplingChecker):
    """``(x - y)^T (A x^{m-1} - A y^{m-1}) > 0`` for every ``x != y``."""

    pairwise = True

    def __init__(self):
        super().__init__(name="strict-pd", description="strict positive definiteness")

    def _values(self, A, X, Y=None):
        return np.sum((X - Y) * (contract_batch(A, X) - contract_batch(A, Y)), axis=1)


def check_p_tensor(A: DenseTensor, budget: int = 10_000, seed: SeedLike = 0, **options) -> ClassReport:
    return PTensorChecker().check(A, budget=budget, seed=seed, **options)


def check_strong_p(A: DenseTensor, budget: int = 10_000, seed: SeedLike = 0, **options) -> ClassReport:
    return StrongPChecker().check(A, budget=budget, seed=seed, **options)


def check_pd(A: DenseTensor, budget: int = 10_000, seed: SeedLike = 0, **options) -> ClassReport:
    return PDChecker().check(A, budget=budget, seed=seed, **options)


def check_strict_pd(A: DenseTensor, budget: int = 10_000, seed: SeedLike = 0, **options) -> ClassReport:
    return StrictPDChecker().check(A, budget=budget, seed=seed, **options)
