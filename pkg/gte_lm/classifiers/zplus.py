"""
Exact decisions for two-dimensional tensors.

``A`` is a Z+-tensor when ``A x^{m-1} + t x = 0`` has no solution with ``x != 0``
and ``t >= 0``. For ``n = 2`` write ``x = x_1 (1, s)``; eliminating ``t`` from
the two components leaves the polynomial

    p(s) = s f_1(1, s) - f_2(1, s),   f_i(x) = (A x^{m-1})_i,

whose real roots are the only directions with ``x_1 != 0``. The direction
``x = (0, 1)`` is a solution iff ``f_1(0, 1) = 0``, the ``s^m`` coefficient of
``p``. At a unit solution direction ``t = -A x^m``.

The P condition ``max_i x_i f_i(x) > 0`` changes sign along ``x = (1, s)`` only
where ``f_1(1, s)`` or ``s f_2(1, s)`` does. Testing both signs of ``x`` at
those roots, between them, beyond them and along ``(0, 1)`` decides it.

Coefficient tolerances are relative to ``max |a|``, and so is the Z+ margin on
``t``, which keeps that verdict invariant under positive scaling of ``A``.
"""

from typing import List, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .base import FALSIFY_TOL, BaseChecker
from ..exceptions import UnsupportedDimensionError
from ..models import CheckMethod, ClassReport, Verdict
from ..tensor import DenseTensor, contract_to_scalar, max_abs_entry

IMAG_TOL = 1e-7
COEFF_RTOL = 1e-13


def _require_dim_two(A: DenseTensor, what: str):
    if A.dim != 2:
        raise UnsupportedDimensionError(f"exact {what} check needs dim 2, got {A.dim}")


def _component_coeffs(A: DenseTensor) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficients (lowest degree first) of ``f_1(1, s)`` and ``f_2(1, s)``."""
    rank = A.order - 1
    twos = np.indices((2,) * rank).reshape(rank, -1).sum(axis=0)
    slices = A.entries.reshape(2, -1)
    c1 = np.bincount(twos, weights=slices[0], minlength=rank + 1)
    c2 = np.bincount(twos, weights=slices[1], minlength=rank + 1)
    return c1, c2


def _real_roots(coeffs: np.ndarray) -> List[float]:
    if len(coeffs) < 2:
        return []
    roots = P.polyroots(coeffs)
    return sorted(float(r.real) for r in roots if abs(r.imag) <= IMAG_TOL * (1.0 + abs(r.real)))


def _unit(s: float) -> np.ndarray:
    return np.array([1.0, s]) / np.hypot(1.0, s)


def solution_directions(A: DenseTensor) -> List[np.ndarray]:
    """Unit vectors ``x`` (up to sign) along which ``A x^{m-1}`` is parallel to ``x``."""
    _require_dim_two(A, "Z+")
    m = A.order
    c1, c2 = _component_coeffs(A)
    ztol = COEFF_RTOL * max_abs_entry(A)

    p = P.polysub(P.polymulx(c1), c2)
    p_trim = P.polytrim(p, ztol)
    boundary = abs(c1[-1]) <= ztol

    if len(p_trim) == 1 and abs(p_trim[0]) <= ztol:
        # every direction solves; t is extremal where A(1,s)^m / (1+s^2)^(m/2) is
        q = P.polyadd(c1, P.polymulx(c2))
        crit = P.polysub(P.polymul(P.polyder(q), [1.0, 0.0, 1.0]), m * P.polymulx(q))
        crit = P.polytrim(crit, ztol)
        slopes = [0.0] + (_real_roots(crit) if np.any(crit) else [])
    else:
        slopes = _real_roots(p_trim)

    dirs = [_unit(s) for s in slopes]
    if boundary:
        dirs.append(np.array([0.0, 1.0]))
    return dirs


def p_test_directions(A: DenseTensor) -> List[np.ndarray]:
    """
    Unit vectors (up to sign) that decide the P condition for ``n = 2``.

    Real parts of complex roots are kept too: a clustered multiple root can
    leave the real axis by more than ``IMAG_TOL``.
    """
    _require_dim_two(A, "P")
    c1, c2 = _component_coeffs(A)
    ztol = COEFF_RTOL * max_abs_entry(A)

    breaks: List[float] = []
    for q in (c1, P.polymulx(c2)):
        q = P.polytrim(q, ztol)
        if len(q) > 1:
            breaks.extend(float(r.real) for r in P.polyroots(q))
    breaks = sorted(set(breaks))

    if breaks:
        slopes = breaks + [(a + b) / 2.0 for a, b in zip(breaks, breaks[1:])]
        slopes += [breaks[0] - 1.0, breaks[-1] + 1.0]
    else:
        slopes = [0.0]
    return [_unit(s) for s in slopes] + [np.array([0.0, 1.0])]


class ZPlus2DChecker(BaseChecker):
    """Holds or Falsified exactly; Falsified carries the solution ``(x, t)`` with ``t >= 0``."""

    def __init__(self):
        super().__init__(name="zplus2d", description="exact two-dimensional Z+ check")

    def check(self, A: DenseTensor, falsify_tol: float = FALSIFY_TOL, **options) -> ClassReport:
        """``falsify_tol`` is relative: ``t >= -falsify_tol * max |a|`` falsifies."""
        dirs = solution_directions(A)
        margin = falsify_tol * max_abs_entry(A)

        best_t, best_x = -np.inf, None
        evaluated = 0
        for d in dirs:
            # x and -x agree for even m; for odd m the sign of t flips
            for x in (d, -d):
                t = -contract_to_scalar(A, x)
                evaluated += 1
                if t > best_t:
                    best_t, best_x = t, x

        if best_x is not None and best_t >= -margin:
            return self._create_report(
                Verdict.FALSIFIED,
                CheckMethod.EXACT_2D,
                samples_used=evaluated,
                witness=best_x,
                witness_value=best_t,
                t=best_t,
                message=f"A x^(m-1) + t x = 0 with t = {best_t:.6g} >= 0"
            )

        return self._create_report(
            Verdict.HOLDS,
            CheckMethod.EXACT_2D,
            samples_used=evaluated,
            t=None if best_x is None else best_t,
            message=f"all {len(dirs)} solution directions give t < 0"
        )


def check_z_plus_2d(A: DenseTensor, **options) -> ClassReport:
    return ZPlus2DChecker().check(A, **options)
