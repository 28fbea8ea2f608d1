"""Configurations of point masses, their configuration matrix, and signed minors."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from ._linalg import DEFAULT_TOL, RankTolerance, numerical_rank
from .errors import DegenerateConfigurationError, DimensionError, InputError

__all__ = [
    "Configuration",
    "pair_index",
    "pairs",
    "embed_config",
    "config_dimension",
    "signed_minor",
    "kernel_vector",
]


def pairs(n: int) -> list[tuple[int, int]]:
    """All pairs ``(i, j)``, ``i < j``, in lexicographic order (0-based)."""
    return list(combinations(range(n), 2))


def pair_index(i: int, j: int, n: int) -> int:
    """Position of the unordered pair {i, j} in the lexicographic pair order."""
    if i == j:
        raise ValueError("a pair needs two distinct bodies")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True, eq=False)
class Configuration:
    """``n`` labelled points in ``R^d``.

    Bodies are indexed from 0 in code.  Sign conventions that depend on body
    labels (the signed minors) use the labels ``1..n``.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise InputError("points must be an (n, d) array")
        n, d = pts.shape
        if n < 2 or d < 1:
            raise InputError(f"need n >= 2 bodies in d >= 1 dimensions, got n={n}, d={d}")
        if not np.all(np.isfinite(pts)):
            raise InputError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        r = self.distances
        if np.any(r <= 0):
            i, j = pairs(n)[int(np.argmin(r))]
            raise DegenerateConfigurationError(f"bodies {i} and {j} coincide")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @cached_property
    def distances(self) -> np.ndarray:
        """Mutual distances ``r_ij`` in lexicographic pair order."""
        i, j = np.triu_indices(self.n, k=1)
        return np.linalg.norm(self.points[i] - self.points[j], axis=1)

    def distance_matrix(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.linalg.norm(diff, axis=2)

    def scaled(self, factor: float) -> "Configuration":
        return Configuration(self.points * factor)

    def permuted(self, perm: Sequence[int]) -> "Configuration":
        """Relabel so that new body ``k`` is old body ``perm[k]``."""
        return Configuration(self.points[list(perm)])

    def reframed(self, dim: int) -> np.ndarray:
        """Coordinates expressed in a ``dim``-dimensional orthonormal frame.

        The frame spans the leading principal directions of the centred points,
        so it is lossless whenever ``dim`` is at least the affine dimension.
        Axis signs are fixed so the largest component of each axis is positive,
        which keeps results deterministic.
        """
        if dim == self.d:
            return self.points
        if dim > self.d:
            pad = np.zeros((self.n, dim - self.d))
            return np.hstack([self.points, pad])
        centred = self.points - self.points.mean(axis=0)
        _, _, vh = np.linalg.svd(centred, full_matrices=False)
        basis = vh[:dim]
        flip = np.sign(basis[np.arange(dim), np.argmax(np.abs(basis), axis=1)])
        basis = basis * flip[:, None]
        return centred @ basis.T


def embed_config(x: Configuration) -> np.ndarray:
    """The ``n x n`` configuration matrix with columns ``(1, x_j, 0, ..., 0)``.

    Configurations with ``d > n - 1`` are first expressed in an ``(n-1)``-frame
    of their affine hull.
    """
    n = x.n
    coords = x.reframed(n - 1) if x.d > n - 1 else x.points
    mat = np.zeros((n, n))
    mat[0, :] = 1.0
    mat[1 : 1 + coords.shape[1], :] = coords.T
    return mat


def config_dimension(x: Configuration, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Dimension of the smallest affine subspace containing the bodies."""
    return numerical_rank(embed_config(x), tol) - 1


def _check_removed(removed: Sequence[int], n: int) -> tuple[int, ...]:
    removed = tuple(int(i) for i in removed)
    if any(b <= a for a, b in zip(removed, removed[1:])):
        raise InputError(f"removed indices must be strictly increasing, got {removed}")
    if removed and (removed[0] < 0 or removed[-1] >= n):
        raise InputError(f"removed indices out of range for n={n}: {removed}")
    if n - len(removed) < 1:
        raise InputError("cannot remove every body")
    return removed


def signed_minor(x: Configuration, removed: Sequence[int]) -> float:
    """Signed determinant of the sub-configuration left after removing bodies.

    With ``len(removed) = k - 1`` the remaining ``n - k + 1`` bodies are
    embedded in ``R^(n-k)`` and their square configuration matrix has order
    ``n - k + 1``.  The sign is ``(-1)**(sum of removed labels)`` with labels
    counted from 1.
    """
    removed = _check_removed(removed, x.n)
    order = x.n - len(removed)
    coords = x.reframed(order - 1)
    keep = np.setdiff1d(np.arange(x.n), removed)
    sub = np.ones((order, order))
    sub[1:, :] = coords[keep].T
    sign = -1.0 if sum(i + 1 for i in removed) % 2 else 1.0
    return sign * float(np.linalg.det(sub))


def kernel_vector(x: Configuration, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """``(Delta_1, ..., Delta_n)`` spanning the kernel of the configuration matrix.

    Only defined for configurations of dimension ``n - 2``.
    """
    dim = config_dimension(x, tol)
    if dim != x.n - 2:
        raise DimensionError(f"kernel vector needs dimension n-2={x.n - 2}, got {dim}")
    delta = np.array([signed_minor(x, [i]) for i in range(x.n)])
    resid = np.linalg.norm(embed_config(x) @ delta)
    if resid > 1e-9 * np.linalg.norm(delta) * max(1.0, np.abs(x.points).max()):
        raise DimensionError(f"minor vector is not in the kernel (residual {resid:.3e})")
    return delta
