"""
The generalized tensor equation

    A_1 x^{m-1} + A_2 x^{m-2} + ... + A_{m-1} x = b

with its residual F(x), Jacobian F'(x) and the scaled system.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .exceptions import DegenerateProblemError, DimensionMismatchError, InvalidProblemError
from .models import ProblemKind
from .tensor import (
    DenseTensor,
    _as_vector,
    contract_to_matrix,
    contract_to_vector,
    max_abs_entry,
    semi_symmetrize,
)


@dataclass(frozen=True, eq=False)
class GteProblem:
    """
    Coefficient tensors of strictly decreasing order plus a right-hand side.

    Orders need not be consecutive: a missing order stands for a zero
    coefficient, so a plain tensor equation ``A x^{m-1} = b`` is a single
    coefficient. Coefficients are semi-symmetrized on construction.
    """
    coeffs: Tuple[DenseTensor, ...]
    rhs: np.ndarray

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise InvalidProblemError("a problem needs at least one coefficient tensor")

        orders = [c.order for c in coeffs]
        if any(a <= b for a, b in zip(orders, orders[1:])):
            raise InvalidProblemError(f"coefficient orders must strictly decrease, got {orders}")

        dims = {c.dim for c in coeffs}
        if len(dims) != 1:
            raise InvalidProblemError(f"coefficient tensors must share one dimension, got {sorted(dims)}")
        dim = dims.pop()

        rhs = np.array(self.rhs, dtype=float).ravel()
        if rhs.shape[0] != dim:
            raise DimensionMismatchError(f"rhs has length {rhs.shape[0]}, coefficients have dim {dim}")
        if not np.all(np.isfinite(rhs)):
            raise InvalidProblemError("rhs entries must be finite")
        rhs.setflags(write=False)

        object.__setattr__(self, "coeffs", tuple(semi_symmetrize(c) for c in coeffs))
        object.__setattr__(self, "rhs", rhs)

    @classmethod
    def planted(cls, coeffs: Sequence[DenseTensor], x_star) -> "GteProblem":
        """Problem whose right-hand side is the exact image of ``x_star``."""
        zero = cls(tuple(coeffs), np.zeros(coeffs[0].dim))
        return cls(zero.coeffs, zero.image(x_star))

    @property
    def dim(self) -> int:
        return self.coeffs[0].dim

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(c.order for c in self.coeffs)

    @property
    def leading_order(self) -> int:
        return self.coeffs[0].order

    def image(self, x) -> np.ndarray:
        """``sum_k A_k x^{m_k - 1}`` without the right-hand side."""
        vec = _as_vector(x, self.dim)
        total = np.zeros(self.dim)
        for coeff in self.coeffs:
            total += contract_to_vector(coeff, vec)
        return total

    def with_rhs(self, rhs) -> "GteProblem":
        return GteProblem(self.coeffs, rhs)

    def __repr__(self) -> str:
        return f"GteProblem(orders={self.orders}, dim={self.dim})"


@dataclass
class ProblemInstance:
    """A problem together with how it was made: kind, scaling factor and planted solution."""
    problem: GteProblem
    kind: Optional[ProblemKind] = None
    omega: float = 1.0
    x_star: Optional[np.ndarray] = None


def residual(P: GteProblem, x) -> np.ndarray:
    """``F(x) = sum_k A_k x^{m_k - 1} - b``."""
    return P.image(x) - P.rhs


def jacobian(P: GteProblem, x) -> np.ndarray:
    """
    ``F'(x) = sum_k (m_k - 1) A_k x^{m_k - 2}``.

    Valid because every coefficient is semi-symmetric; an order-2 coefficient
    contributes its matrix.
    """
    vec = _as_vector(x, P.dim)
    jac = np.zeros((P.dim, P.dim))
    for coeff in P.coeffs:
        jac += (coeff.order - 1) * contract_to_matrix(coeff, vec)
    return jac


def problem_omega(P: GteProblem) -> float:
    """Largest absolute entry over every coefficient and the right-hand side."""
    omega = max(max_abs_entry(c) for c in P.coeffs)
    if P.rhs.size:
        omega = max(omega, float(np.max(np.abs(P.rhs))))
    return omega


def scale(P: GteProblem) -> Tuple[GteProblem, float]:
    """
    Divide every coefficient and ``b`` by one scalar ``omega``.

    The solution set is unchanged and the scaled residual is the original
    residual divided by ``omega``.
    """
    omega = problem_omega(P)
    if omega == 0.0:
        raise DegenerateProblemError("cannot scale a problem whose coefficients and rhs are all zero")
    if omega == 1.0:
        return P, 1.0
    scaled = GteProblem(
        tuple(DenseTensor(c.order, c.dim, c.entries / omega) for c in P.coeffs),
        P.rhs / omega,
    )
    return scaled, omega
