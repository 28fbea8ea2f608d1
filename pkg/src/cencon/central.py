"""Central-configuration certification and the Dziobek parametrization."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from ._linalg import DEFAULT_TOL, RankTolerance, numerical_rank
from .cayley_menger import cm_cofactors, kernel_lift, mutual_distances
from .errors import CertificationError, ConsistencyError, DimensionError, InputError
from .geometry import Configuration, config_dimension, kernel_vector, pair_index, signed_minor

__all__ = [
    "CERT_TOL",
    "Exponent",
    "as_masses",
    "DziobekData",
    "CofactorFactorization",
    "CertificationReport",
    "cc_residual",
    "fit_lambda",
    "s_matrix",
    "s_weighted_residual",
    "gwf_residuals",
    "dziobek_data",
    "cofactor_factorization",
    "alpha_from_cofactors",
    "certify",
]

CERT_TOL = 1e-8


@dataclass(frozen=True)
class Exponent:
    """Semi-integer potential exponent, stored exactly as ``two_a = 2a``."""

    two_a: int

    def __post_init__(self):
        if isinstance(self.two_a, bool) or int(self.two_a) != self.two_a:
            raise InputError(f"two_a must be an integer, got {self.two_a!r}")
        object.__setattr__(self, "two_a", int(self.two_a))

    @classmethod
    def newtonian(cls) -> "Exponent":
        return cls(-3)

    @property
    def a(self) -> float:
        return self.two_a / 2

    def require_nonzero(self) -> None:
        if self.two_a == 0:
            raise InputError("this operation needs a nonzero exponent")


def as_masses(m, n: Optional[int] = None) -> np.ndarray:
    m = np.array(m, dtype=float).ravel()
    if n is not None and m.size != n:
        raise InputError(f"expected {n} masses, got {m.size}")
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise InputError("masses must be finite and positive")
    return m


def _pow(r, two_a: int):
    """``r^(2a)`` where ``two_a = 2a`` is an integer."""
    return r ** float(two_a)


def _cc_terms(x: Configuration, m: np.ndarray, a: Exponent):
    """Pairwise attraction sums and displacements from the centre of mass."""
    pts = x.points
    diff = pts[None, :, :] - pts[:, None, :]  # diff[j, i] = x_i - x_j
    dist = x.distance_matrix()
    with np.errstate(divide="ignore"):
        weight = np.where(dist > 0, dist ** float(a.two_a), 0.0) * m[None, :]
    np.fill_diagonal(weight, 0.0)
    terms = weight[:, :, None] * diff  # terms[j, i] = m_i (x_i - x_j) r_ij^(2a)
    centre = m @ pts / m.sum()
    return terms, pts - centre


def cc_residual(x: Configuration, m, a: Exponent, lam: float) -> float:
    """Relative residual of the central-configuration equations for a given lambda."""
    m = as_masses(m, x.n)
    terms, disp = _cc_terms(x, m, a)
    res = terms.sum(axis=1) + lam * disp
    scale = max(np.linalg.norm(terms, axis=2).max(), np.abs(lam) * np.linalg.norm(disp, axis=1).max())
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(res, axis=1).max() / scale)


def fit_lambda(x: Configuration, m, a: Exponent) -> float:
    """Least-squares lambda over all bodies (closed form)."""
    m = as_masses(m, x.n)
    if a.two_a == 0:
        return float(m.sum())
    terms, disp = _cc_terms(x, m, a)
    denom = np.sum(disp**2)
    if denom <= 1e-300:
        raise InputError("every body sits at the centre of mass")
    return float(-np.sum(terms.sum(axis=1) * disp) / denom)


def s_matrix(x: Configuration, m, a: Exponent, lam: float) -> np.ndarray:
    """``S_ij = r_ij^(2a) - lambda/M`` in pair order."""
    m = as_masses(m, x.n)
    if lam == 0:
        raise InputError("lambda must be nonzero")
    return _pow(x.distances, a.two_a) - lam / m.sum()


def s_weighted_residual(x: Configuration, m, s: np.ndarray) -> float:
    """``max_j |sum_i m_i S_ij (x_i - x_j)|`` relative to the largest term."""
    m = as_masses(m, x.n)
    n = x.n
    s_full = np.zeros((n, n))
    i, j = np.triu_indices(n, k=1)
    s_full[i, j] = s
    s_full[j, i] = s
    diff = x.points[None, :, :] - x.points[:, None, :]
    terms = (s_full * m[None, :])[:, :, None] * diff
    scale = np.linalg.norm(terms, axis=2).max()
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(terms.sum(axis=1), axis=1).max() / scale)


def gwf_residuals(
    x: Configuration, m, a: Exponent, k: int, tol: RankTolerance = DEFAULT_TOL
) -> float:
    """Worst relative violation of the trilinear equations for a configuration
    of dimension ``n - k``.

    For each body ``j`` and each ``k``-subset ``I`` of the other bodies the
    alternating sum ``sum_l (-1)^l m_(i_l) S_(i_l j) Delta_(I minus i_l)`` is
    evaluated; subsets containing ``j`` are skipped since ``S_jj`` is undefined.
    """
    m = as_masses(m, x.n)
    n = x.n
    if not 2 <= k <= n - 1:
        raise InputError(f"k must lie in 2..{n - 1}, got {k}")
    dim = config_dimension(x, tol)
    if dim != n - k:
        raise DimensionError(f"trilinear equations of order k={k} need dimension {n - k}, got {dim}")
    lam = fit_lambda(x, m, a)
    s = s_matrix(x, m, a, lam)
    minors = {sub: signed_minor(x, sub) for sub in combinations(range(n), k - 1)}
    worst = 0.0
    biggest = 0.0
    for j in range(n):
        others = [i for i in range(n) if i != j]
        for subset in combinations(others, k):
            total = 0.0
            for l, il in enumerate(subset, start=1):
                rest = subset[: l - 1] + subset[l:]
                term = (-1) ** l * m[il] * s[pair_index(il, j, n)] * minors[rest]
                total += term
                biggest = max(biggest, abs(term))
            worst = max(worst, abs(total))
    return 0.0 if biggest == 0 else worst / biggest


@dataclass(frozen=True, eq=False)
class DziobekData:
    delta: np.ndarray
    w: np.ndarray
    kappa: float
    lam: float
    r0_pow: float  # r0^(2a) = lambda / M
    consistency: float = 0.0
    r0: Optional[float] = None  # only when lambda / M > 0

    def to_json(self) -> dict:
        return {
            "delta": self.delta.tolist(),
            "w": self.w.tolist(),
            "kappa": self.kappa,
            "lambda": self.lam,
            "r0_pow": self.r0_pow,
            "r0": self.r0,
            "consistency": self.consistency,
        }


def _require_central(x, m, a, tol):
    lam = fit_lambda(x, m, a)
    res = cc_residual(x, m, a, lam)
    if res > tol:
        raise CertificationError(f"not central: residual {res:.3e} > {tol:.1e}")
    return lam, res


def dziobek_data(
    x: Configuration, m, a: Exponent, tol: float = CERT_TOL, rank_tol: RankTolerance = DEFAULT_TOL
) -> DziobekData:
    """Fit ``S_ij = kappa w_i w_j`` for a central configuration of dimension n-2."""
    m = as_masses(m, x.n)
    a.require_nonzero()
    delta = kernel_vector(x, rank_tol)
    lam, _ = _require_central(x, m, a, tol)
    w = delta / m
    if np.count_nonzero(np.abs(w) > 1e-8 * np.abs(w).max()) < 2:
        raise CertificationError("fewer than two nonzero w_i")
    s = s_matrix(x, m, a, lam)
    i, j = np.triu_indices(x.n, k=1)
    ww = w[i] * w[j]
    good = np.abs(ww) > 1e-6 * np.abs(ww).max()
    kappa = float(s[good] @ ww[good] / (ww[good] @ ww[good]))
    smax = np.abs(s).max()
    consistency = float(np.abs(s - kappa * ww).max() / smax) if smax > 0 else 0.0
    if consistency > tol or kappa == 0:
        raise CertificationError(f"S is not kappa * w w^T (relative deviation {consistency:.3e})")
    r0_pow = lam / m.sum()
    r0 = float(r0_pow ** (1 / a.two_a)) if r0_pow > 0 else None
    return DziobekData(delta, w, kappa, lam, r0_pow, consistency, r0)


@dataclass(frozen=True, eq=False)
class CofactorFactorization:
    alpha: float
    kernel: np.ndarray  # (Delta_0, Delta_1, ..., Delta_n)
    cofactors: np.ndarray
    deviation: float  # max |F_ij - alpha Delta_i Delta_j| / max |F_ij|
    rank: int


def cofactor_factorization(
    x: Configuration, tol: RankTolerance = DEFAULT_TOL
) -> CofactorFactorization:
    """Rank-one fit ``F_ij = alpha Delta_i Delta_j`` of the Cayley-Menger cofactors."""
    delta = kernel_vector(x, tol)
    kern = kernel_lift(x, delta)
    cof = cm_cofactors(mutual_distances(x))
    outer = np.outer(kern, kern)
    good = np.abs(outer) > 1e-6 * np.abs(outer).max()
    alpha = float(cof[good] @ outer[good] / (outer[good] @ outer[good]))
    fmax = np.abs(cof).max()
    deviation = float(np.abs(cof - alpha * outer).max() / fmax)
    return CofactorFactorization(alpha, kern, cof, deviation, numerical_rank(cof, tol))


def alpha_from_cofactors(x: Configuration, tol: float = CERT_TOL) -> float:
    fac = cofactor_factorization(x)
    if fac.alpha == 0 or fac.deviation > tol:
        raise ConsistencyError(f"cofactor matrix is not alpha * Delta Delta^T (deviation {fac.deviation:.3e})")
    return fac.alpha


@dataclass
class CertificationReport:
    central: bool
    lam: float
    residual: float
    dimension: int
    dziobek: Optional[DziobekData] = None
    alpha: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "central": self.central,
            "lambda": self.lam,
            "residual": self.residual,
            "dimension": self.dimension,
        }
        if self.dziobek is not None:
            out["dziobek"] = self.dziobek.to_json()
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def certify(
    x: Configuration, m, a: Exponent, tol: float = CERT_TOL, rank_tol: RankTolerance = DEFAULT_TOL
) -> CertificationReport:
    """Check centrality and, for dimension n-2, attach the Dziobek data and alpha."""
    m = as_masses(m, x.n)
    dim = config_dimension(x, rank_tol)
    lam = fit_lambda(x, m, a)
    res = cc_residual(x, m, a, lam)
    report = CertificationReport(bool(res <= tol and lam != 0), lam, res, dim)
    if a.two_a == 0:
        report.notes.append("a = 0: every configuration is central with lambda = M")
    elif report.central and dim == x.n - 2:
        try:
            report.dziobek = dziobek_data(x, m, a, tol, rank_tol)
            report.alpha = alpha_from_cofactors(x, tol)
        except (CertificationError, ConsistencyError) as exc:
            report.notes.append(str(exc))
    return report
