"""Small dense linear-algebra helpers shared by every module."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value threshold used for numerical rank.

    A singular value counts toward the rank when it exceeds
    ``rel_eps * s_max * max(rows, cols)``.
    """

    rel_eps: float = 1e-10

    def __post_init__(self):
        if not self.rel_eps > 0:
            raise ValueError(f"rel_eps must be positive, got {self.rel_eps!r}")


DEFAULT_TOL = RankTolerance()


def numerical_rank(a, tol: RankTolerance = DEFAULT_TOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol.rel_eps * s[0] * max(a.shape)))


def adjugate(a: np.ndarray) -> np.ndarray:
    """Adjugate (transposed cofactor matrix) via the SVD.

    Stable for singular matrices, where ``det(a) * inv(a)`` is not available.
    Works for real and complex input.
    """
    a = np.asarray(a)
    size = a.shape[0]
    if size == 1:
        return np.ones((1, 1), dtype=a.dtype)
    u, s, vh = np.linalg.svd(a)
    # prod_{j != i} s_j without dividing by s_i
    left = np.concatenate(([1.0], np.cumprod(s[:-1])))
    right = np.concatenate((np.cumprod(s[::-1][:-1])[::-1], [1.0]))
    partial = left * right
    phase = np.linalg.det(u) * np.linalg.det(vh)
    adj = phase * (vh.conj().T * partial) @ u.conj().T
    if np.isrealobj(a):
        adj = adj.real
    return adj


def cofactor_matrix(a: np.ndarray) -> np.ndarray:
    """Signed cofactors ``C[i, j] = (-1)**(i+j) det(minor(a, i, j))``.

    Orders up to 8 go through the adjugate; larger ones expand minor by minor.
    """
    a = np.asarray(a)
    size = a.shape[0]
    if size <= 8:
        return adjugate(a).T
    return cofactor_matrix_by_minors(a)


def cofactor_matrix_by_minors(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    size = a.shape[0]
    out = np.empty_like(a)
    idx = np.arange(size)
    for i in range(size):
        rows = idx[idx != i]
        for j in range(size):
            cols = idx[idx != j]
            out[i, j] = (-1) ** (i + j) * np.linalg.det(a[np.ix_(rows, cols)])
    return out


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a matrix with rational entries (fraction-free Bareiss)."""
    m = [[Fraction(v) for v in row] for row in rows]
    size = len(m)
    if size == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(size - 1):
        if m[k][k] == 0:
            for p in range(k + 1, size):
                if m[p][k] != 0:
                    m[k], m[p] = m[p], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[-1][-1]
