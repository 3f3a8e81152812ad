"""
Seeded random problem instances.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``, a fixed,
documented bit generator, so an instance is a pure function of its arguments.
Uniform draws are half-open, ``[lo, hi)``.
"""

from typing import Sequence, Tuple, Union

import numpy as np

from .models import GenSpec, ProblemKind
from .problem import GteProblem, ProblemInstance, scale
from .tensor import DenseTensor, contract_to_vector

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

DEFAULT_SIGMA = 0.1
GENERAL_RANGE = (-5.0, 5.0)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """PCG64 generator for an integer seed or seed sequence; generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def _m_tensor(rng: np.random.Generator, order: int, dim: int, sigma: float) -> DenseTensor:
    B = rng.random((dim,) * order)
    row_sums = B.reshape(dim, -1).sum(axis=1)
    s = (1.0 + sigma) * float(row_sums.max())
    A = -B
    A[(np.arange(dim),) * order] += s
    return DenseTensor.from_array(A)


def gen_m_tensor(order: int, dim: int, sigma: float = DEFAULT_SIGMA, seed: SeedLike = 0) -> DenseTensor:
    """
    ``A = s I - B`` with ``B`` uniform on [0, 1) and ``s = (1 + sigma) * max row sum of B``.

    Since ``rho(B)`` is bounded by the largest row sum, ``A`` is a nonsingular M-tensor.
    """
    if order < 2 or dim < 1:
        raise ValueError(f"need order >= 2 and dim >= 1, got ({order}, {dim})")
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return _m_tensor(make_rng(seed), order, dim, sigma)


def spectral_radius_estimate(B: DenseTensor, iters: int = 500, seed: SeedLike = 0) -> float:
    """
    Power iteration for the spectral radius of a nonnegative tensor.

    Iterates ``x <- (B x^{m-1})^{1/(m-1)}`` normalized; the ratio bounds
    ``min_i`` and ``max_i`` of ``(B x^{m-1})_i / x_i^{m-1}`` squeeze ``rho(B)``.
    Returns the upper bound.
    """
    rng = make_rng(seed)
    x = rng.random(B.dim) + 0.5
    x /= np.linalg.norm(x)
    upper = np.inf
    for _ in range(iters):
        y = contract_to_vector(B, x)
        ratios = y / x ** (B.order - 1)
        upper = float(ratios.max())
        if upper - float(ratios.min()) <= 1e-13 * max(upper, 1.0):
            break
        x = y ** (1.0 / (B.order - 1))
        x /= np.linalg.norm(x)
    return upper


def gen_te_instance(order: int, dim: int, seed: SeedLike = 0, sigma: float = DEFAULT_SIGMA) -> Tuple[GteProblem, float]:
    """Scaled M-tensor equation ``A x^{m-1} = b`` with ``b`` uniform on [0, 1)."""
    if order < 3:
        raise ValueError(f"tensor equations need order >= 3, got {order}")
    rng = make_rng(seed)
    A = _m_tensor(rng, order, dim, sigma)
    b = rng.random(dim)
    return scale(GteProblem((A,), b))


def gen_general_planted(
    orders: Sequence[int],
    dim: int,
    entry_range: Tuple[float, float] = GENERAL_RANGE,
    seed: SeedLike = 0,
) -> Tuple[GteProblem, np.ndarray]:
    """
    Coefficients uniform on ``entry_range`` and ``x*`` uniform on [0, 1)^n.

    ``b`` is the image of ``x*`` under the semi-symmetrized coefficients, and
    the problem is returned scaled.
    """
    instance = _gen_planted(orders, dim, entry_range, seed, ProblemKind.PLANTED_GENERAL)
    return instance.problem, instance.x_star


def _gen_gte_m(orders: Sequence[int], dim: int, sigma: float, seed: SeedLike) -> ProblemInstance:
    rng = make_rng(seed)
    coeffs = tuple(_m_tensor(rng, order, dim, sigma) for order in orders)
    b = rng.random(dim)
    problem, omega = scale(GteProblem(coeffs, b))
    return ProblemInstance(problem, ProblemKind.MTENSOR, omega, None)


def _gen_planted(orders: Sequence[int], dim: int, entry_range, seed: SeedLike, kind: ProblemKind) -> ProblemInstance:
    rng = make_rng(seed)
    lo, hi = entry_range
    coeffs = tuple(DenseTensor.from_array(rng.uniform(lo, hi, (dim,) * order)) for order in orders)
    x_star = rng.random(dim)
    problem, omega = scale(GteProblem.planted(coeffs, x_star))
    return ProblemInstance(problem, kind, omega, x_star)


def gen_gte_instance(
    orders: Sequence[int] = (4, 3, 2),
    dim: int = 5,
    kind: ProblemKind = ProblemKind.MTENSOR,
    seed: SeedLike = 0,
) -> GteProblem:
    """
    Generalized equation with one coefficient per order.

    M-tensor kind: every coefficient an M-tensor, ``b`` uniform on [0, 1).
    General kind: coefficients uniform on (-5, 5) and ``b`` planted from a
    random ``x*`` so a solution exists.
    """
    return generate_instance(orders, dim, kind, seed).problem


def generate_instance(
    orders: Sequence[int],
    dim: int,
    kind: ProblemKind,
    seed: SeedLike,
    sigma: float = DEFAULT_SIGMA,
    entry_range: Tuple[float, float] = GENERAL_RANGE,
) -> ProblemInstance:
    if kind == ProblemKind.MTENSOR:
        return _gen_gte_m(orders, dim, sigma, seed)
    if kind in (ProblemKind.GENERAL_RANDOM, ProblemKind.PLANTED_GENERAL):
        return _gen_planted(orders, dim, entry_range, seed, kind)
    raise ValueError(f"unknown problem kind {kind!r}")


def generate(spec: GenSpec) -> ProblemInstance:
    """Instance for a validated :class:`GenSpec`."""
    return generate_instance(spec.orders, spec.dim, spec.kind, spec.seed, spec.sigma, spec.entry_range)


def starting_point(instance: ProblemInstance, mode: str = "ones") -> np.ndarray:
    """All-ones, or ``x* + 1`` for planted instances (``planted-offset``)."""
    ones = np.ones(instance.problem.dim)
    if mode == "ones":
        return ones
    if mode == "planted-offset":
        if instance.x_star is None:
            raise ValueError("planted-offset start needs a planted solution x*")
        return np.asarray(instance.x_star, dtype=float) + ones
    raise ValueError(f"unknown starting point mode {mode!r}")


def trial_seed(seed0: int, *key: int) -> np.random.SeedSequence:
    """Independent stream for one trial, keyed by integers such as (shape index, trial)."""
    return np.random.SeedSequence(entropy=seed0, spawn_key=tuple(key))

