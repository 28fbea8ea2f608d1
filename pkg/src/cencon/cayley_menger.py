"""Cayley-Menger matrices and the rank criterion for configuration dimension."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._linalg import DEFAULT_TOL, RankTolerance, cofactor_matrix, numerical_rank
from .errors import ConsistencyError, InputError
from .geometry import Configuration, embed_config

__all__ = [
    "DistanceVector",
    "mutual_distances",
    "bordered_matrix",
    "cm_matrix",
    "cm_det",
    "cm_cofactor",
    "cm_cofactors",
    "cm_rank",
    "dimension_from_distances",
    "kernel_lift",
    "Membership",
    "determinantal_membership",
    "grad_cm_det",
]


def _n_from_q(q: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * q)) / 2))
    if n * (n - 1) // 2 != q:
        raise InputError(f"{q} is not a triangular number n(n-1)/2")
    return n


@dataclass(frozen=True, eq=False)
class DistanceVector:
    """The ``q = n(n-1)/2`` mutual distances in lexicographic pair order."""

    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float).ravel()
        _n_from_q(r.size)
        if r.size == 0:
            raise InputError("need at least one distance")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise InputError("mutual distances must be finite and strictly positive")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return _n_from_q(self.r.size)

    @property
    def q(self) -> int:
        return self.r.size

    def matrix(self) -> np.ndarray:
        """Symmetric ``n x n`` distance matrix."""
        n = self.n
        out = np.zeros((n, n))
        i, j = np.triu_indices(n, k=1)
        out[i, j] = self.r
        out[j, i] = self.r
        return out


def mutual_distances(x: Configuration) -> DistanceVector:
    return DistanceVector(x.distances)


def bordered_matrix(s: np.ndarray, n: int) -> np.ndarray:
    """Bordered matrix for arbitrary (possibly complex) pair values ``s``."""
    s = np.asarray(s)
    a = np.zeros((n + 1, n + 1), dtype=np.result_type(s, float))
    a[0, 1:] = 1
    a[1:, 0] = 1
    i, j = np.triu_indices(n, k=1)
    a[i + 1, j + 1] = s
    a[j + 1, i + 1] = s
    return a


def cm_matrix(r: DistanceVector) -> np.ndarray:
    return bordered_matrix(r.r**2, r.n)


def cm_det(r: DistanceVector) -> float:
    return float(np.linalg.det(cm_matrix(r)))


def cm_cofactors(r: DistanceVector) -> np.ndarray:
    """Full ``(n+1) x (n+1)`` matrix of signed cofactors ``F_ij``."""
    return cofactor_matrix(cm_matrix(r))


def cm_cofactor(r: DistanceVector, i: int, j: int) -> float:
    n = r.n
    if not (0 <= i <= n and 0 <= j <= n):
        raise InputError(f"cofactor index out of range 0..{n}: ({i}, {j})")
    a = cm_matrix(r)
    keep_r = [k for k in range(n + 1) if k != i]
    keep_c = [k for k in range(n + 1) if k != j]
    return (-1) ** (i + j) * float(np.linalg.det(a[np.ix_(keep_r, keep_c)]))


def grad_cm_det(r: np.ndarray, n: int) -> np.ndarray:
    """Partials of ``F`` with respect to each ``R_ij``: ``4 R_ij F_ij(R^2)``."""
    r = np.asarray(r)
    cof = cofactor_matrix(bordered_matrix(r**2, n))
    i, j = np.triu_indices(n, k=1)
    return 4 * r * cof[i + 1, j + 1]


def cm_rank(r: DistanceVector, tol: RankTolerance = DEFAULT_TOL) -> int:
    return numerical_rank(cm_matrix(r), tol)


def dimension_from_distances(r: DistanceVector, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Configuration dimension read off the Cayley-Menger rank (rank - 2)."""
    rank = cm_rank(r, tol)
    if rank < 2:
        raise InputError(f"Cayley-Menger rank {rank} < 2: inconsistent distance data")
    return rank - 2


def kernel_lift(x: Configuration, v) -> np.ndarray:
    """Map a kernel vector of the configuration matrix into ``Ker(A(x))``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (x.n,):
        raise InputError(f"kernel vector must have length {x.n}")
    scale = np.linalg.norm(v)
    if np.linalg.norm(embed_config(x) @ v) > 1e-8 * scale * max(1.0, np.abs(x.points).max()):
        raise InputError("vector is not in the kernel of the configuration matrix")
    sq = np.sum(x.points**2, axis=1)
    lifted = np.concatenate(([-sq @ v], v))
    a = cm_matrix(mutual_distances(x))
    if np.linalg.norm(a @ lifted) > 1e-8 * max(np.linalg.norm(lifted), 1e-300) * max(1.0, np.abs(a).max()):
        raise ConsistencyError("lifted vector is not in the Cayley-Menger kernel")
    return lifted


class Membership(NamedTuple):
    k: int
    in_n_k3: bool  # every (k+3)-minor vanishes
    in_n_k2: bool  # every (k+2)-minor vanishes


def determinantal_membership(
    r: DistanceVector, k: int, tol: RankTolerance = DEFAULT_TOL
) -> Membership:
    """Membership of ``r`` in the determinantal sets ``N_(k+3)`` and ``N_(k+2)``.

    ``N_j`` is cut out by all ``j x j`` minors of the Cayley-Menger matrix,
    which vanish exactly when its rank is below ``j``.  Sizes larger than the
    matrix vanish vacuously.
    """
    if not 1 <= k <= r.n - 1:
        raise InputError(f"k must lie in 1..{r.n - 1}, got {k}")
    rank = cm_rank(r, tol)
    return Membership(k, rank < k + 3, rank < k + 2)
