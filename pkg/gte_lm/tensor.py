"""
Dense real tensors and the contractions everything else is built on.

Entries are stored flat in lexicographic index order: the first index varies
slowest and the last index fastest, so ``entries.reshape((n,) * order)`` is the
natural C-ordered view.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .exceptions import DimensionMismatchError, InvalidTensorError


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """
    An order-``order``, dimension-``dim`` square real tensor.

    The entry array is copied on construction and made read-only, so a tensor
    can be shared freely between solves.
    """
    order: int
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if int(self.order) < 2:
            raise InvalidTensorError(f"tensor order must be >= 2, got {self.order}")
        if int(self.dim) < 1:
            raise InvalidTensorError(f"tensor dimension must be >= 1, got {self.dim}")

        entries = np.array(self.entries, dtype=float).ravel()
        expected = int(self.dim) ** int(self.order)
        if entries.size != expected:
            raise InvalidTensorError(
                f"order-{self.order} dim-{self.dim} tensor needs {expected} entries, got {entries.size}"
            )
        if not np.all(np.isfinite(entries)):
            raise InvalidTensorError("tensor entries must be finite (NaN/Inf rejected)")

        entries.setflags(write=False)
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_array(cls, array) -> "DenseTensor":
        """Build a tensor from an ``(n, n, ..., n)`` shaped array."""
        arr = np.asarray(array, dtype=float)
        if arr.ndim < 2 or len(set(arr.shape)) != 1:
            raise InvalidTensorError(f"expected a square array of order >= 2, got shape {arr.shape}")
        return cls(order=arr.ndim, dim=arr.shape[0], entries=arr)

    @classmethod
    def zeros(cls, order: int, dim: int) -> "DenseTensor":
        return cls(order=order, dim=dim, entries=np.zeros(dim ** order))

    @property
    def array(self) -> np.ndarray:
        """Read-only ``(n,) * order`` view of the entries."""
        return self.entries.reshape((self.dim,) * self.order)

    @property
    def shape(self) -> tuple:
        return (self.dim,) * self.order

    def __repr__(self) -> str:
        return f"DenseTensor(order={self.order}, dim={self.dim})"


def _as_vector(x, dim: int) -> np.ndarray:
    vec = np.asarray(x, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatchError(f"expected a vector of length {dim}, got shape {vec.shape}")
    return vec


def contract_to_vector(A: DenseTensor, x) -> np.ndarray:
    """Return ``A x^{l-1}``, folding the last index against ``x`` once per pass."""
    vec = _as_vector(x, A.dim)
    out = A.array
    for _ in range(A.order - 1):
        out = out @ vec
    return out


def contract_to_matrix(A: DenseTensor, x) -> np.ndarray:
    """Return the ``n x n`` matrix ``A x^{l-2}``; an order-2 tensor is returned as its matrix."""
    vec = _as_vector(x, A.dim)
    out = A.array
    for _ in range(A.order - 2):
        out = out @ vec
    return np.array(out)


def contract_to_scalar(A: DenseTensor, x) -> float:
    """Return ``A x^l = x^T (A x^{l-1})``."""
    vec = _as_vector(x, A.dim)
    return float(vec @ contract_to_vector(A, vec))


def contract_batch(A: DenseTensor, X) -> np.ndarray:
    """
    Contract many vectors at once.

    ``X`` has shape ``(k, n)``; row ``r`` of the result is ``A X[r]^{l-1}``.
    """
    pts = np.asarray(X, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != A.dim:
        raise DimensionMismatchError(f"expected points of shape (k, {A.dim}), got {pts.shape}")

    n, k = A.dim, pts.shape[0]
    cols = pts.T
    out = A.entries.reshape(-1, n) @ cols
    for _ in range(A.order - 2):
        out = np.einsum("rjk,jk->rk", out.reshape(-1, n, k), cols)
    return out.T


@lru_cache(maxsize=None)
def _canonical_index(rank: int, dim: int) -> tuple:
    # For every trailing multi-index, the index of its sorted representative.
    idx = np.indices((dim,) * rank).reshape(rank, -1)
    return tuple(np.sort(idx, axis=0))


def is_semi_symmetric(A: DenseTensor) -> bool:
    """True when every slice ``A[i]`` is exactly symmetric in its remaining indices."""
    if A.order <= 2:
        return True
    flat = A.entries.reshape(A.dim, -1)
    canon = A.array[(slice(None),) + _canonical_index(A.order - 1, A.dim)]
    return bool(np.array_equal(flat, canon))


def semi_symmetrize(A: DenseTensor) -> DenseTensor:
    """
    Average each slice ``A[i]`` over all permutations of its ``l - 1`` indices.

    The contraction ``A x^{l-1}`` is unchanged. Entries of one permutation orbit
    are copied from a single averaged value so the result is exactly
    semi-symmetric, and a semi-symmetric input is returned as is.
    """
    if is_semi_symmetric(A):
        return A

    rank = A.order - 1
    perms = list(itertools.permutations(range(rank)))
    arr = A.array
    averaged = np.empty(arr.shape)

    # slice by slice to bound working memory
    for i in range(A.dim):
        slab = arr[i]
        acc = np.zeros(slab.shape)
        for perm in perms:
            acc += slab.transpose(perm)
        averaged[i] = acc / len(perms)

    canon = averaged[(slice(None),) + _canonical_index(rank, A.dim)]
    return DenseTensor(A.order, A.dim, canon.ravel())


def unit_tensor(order: int, dim: int) -> DenseTensor:
    """The unit tensor: ones where all indices agree, zeros elsewhere."""
    if order < 2 or dim < 1:
        raise InvalidTensorError(f"unit tensor needs order >= 2 and dim >= 1, got ({order}, {dim})")
    arr = np.zeros((dim,) * order)
    arr[(np.arange(dim),) * order] = 1.0
    return DenseTensor.from_array(arr)


def max_abs_entry(A: DenseTensor, b: Optional[Sequence[float]] = None) -> float:
    """Largest absolute value among the entries of ``A`` and of ``b``."""
    omega = float(np.max(np.abs(A.entries)))
    if b is not None and len(b) > 0:
        omega = max(omega, float(np.max(np.abs(np.asarray(b, dtype=float)))))
    return omega
