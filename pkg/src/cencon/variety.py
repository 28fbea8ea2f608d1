"""Lifted points of Dziobek configurations and the polynomial system they satisfy.

Variables of the ambient space are ordered ``(R_12, ..., R_(n-1)n, Z_1, ..., Z_n,
Delta, M_1, ..., M_n)``; equations are ordered ``(g_12, ..., g_(n-1)n, F,
Gamma_0, ..., Gamma_n)``.  Both orders are part of the public interface, since
Jacobian dumps and the ``H`` submatrix depend on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ._linalg import DEFAULT_TOL, RankTolerance, cofactor_matrix, numerical_rank
from .cayley_menger import bordered_matrix, grad_cm_det
from .central import CERT_TOL, Exponent, as_masses, certify, dziobek_data
from .errors import (
    CertificationError,
    ConsistencyError,
    DegenerateConfigurationError,
    DimensionError,
    InputError,
    NormalizationError,
)
from .geometry import Configuration, pair_index, pairs

__all__ = [
    "LiftedPoint",
    "SystemValues",
    "WFlags",
    "HDeterminant",
    "JacobianRank",
    "lift_point",
    "system_equations",
    "system_jacobian",
    "system_residual",
    "psi_values",
    "psi_closed_form",
    "lifted_alpha",
    "grad_F_identity_check",
    "w_membership",
    "jacobian",
    "h_submatrix_det",
    "jacobian_rank",
    "gamma_block_rank",
]


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    n: int
    two_a: int
    r: np.ndarray
    z: np.ndarray
    delta0: complex
    m: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        if self.two_a == 0:
            raise InputError("lifted points need a nonzero exponent")
        q = self.n * (self.n - 1) // 2
        r = np.array(self.r, dtype=float).ravel()
        z = np.array(self.z, dtype=complex).ravel()
        m = np.array(self.m, dtype=float).ravel()
        if r.size != q or z.size != self.n or m.size != self.n:
            raise InputError(f"lifted point for n={self.n} needs {q} distances and {self.n} z and m values")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "delta0", complex(self.delta0))

    @property
    def q(self) -> int:
        return self.r.size

    def vector(self) -> np.ndarray:
        """Flat coordinates in the documented variable order."""
        return np.concatenate([self.r.astype(complex), self.z, [self.delta0], self.m.astype(complex)])

    def mirror(self) -> "LiftedPoint":
        return LiftedPoint(self.n, self.two_a, self.r, -self.z, -self.delta0, self.m, self.normalized)

    def permuted(self, perm: Sequence[int]) -> "LiftedPoint":
        """Relabel so that new body ``k`` is old body ``perm[k]``."""
        perm = list(perm)
        n = self.n
        r = np.array([self.r[pair_index(perm[i], perm[j], n)] for i, j in pairs(n)])
        return LiftedPoint(n, self.two_a, r, self.z[perm], self.delta0, self.m[perm], self.normalized)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "two_a": self.two_a,
            "r": self.r.tolist(),
            "z_re": self.z.real.tolist(),
            "z_im": self.z.imag.tolist(),
            "delta0_re": self.delta0.real,
            "delta0_im": self.delta0.imag,
            "m": self.m.tolist(),
            "normalized": self.normalized,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LiftedPoint":
        try:
            z = np.asarray(data["z_re"], dtype=float) + 1j * np.asarray(data["z_im"], dtype=float)
            return cls(
                n=int(data["n"]),
                two_a=int(data["two_a"]),
                r=data["r"],
                z=z,
                delta0=complex(data["delta0_re"], data["delta0_im"]),
                m=data["m"],
                normalized=bool(data.get("normalized", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed lifted point: {exc}") from exc


def _split(v: np.ndarray, n: int):
    q = n * (n - 1) // 2
    return v[:q], v[q : q + n], v[q + n], v[q + n + 1 :]


def _sym(values: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=values.dtype)
    i, j = np.triu_indices(n, k=1)
    out[i, j] = values
    out[j, i] = values
    return out


def system_equations(v: np.ndarray, n: int, two_a: int) -> np.ndarray:
    """All ``q + n + 2`` defining functions at a flat coordinate vector."""
    v = np.asarray(v, dtype=complex)
    r, z, delta, m = _split(v, n)
    i, j = np.triu_indices(n, k=1)
    zz = z[i] * z[j]
    if two_a < 0:
        g = r ** (-two_a) * (zz + 1) - 1
    else:
        g = r**two_a - 1 - zz
    f = np.linalg.det(bordered_matrix(r**2, n))
    mz = m * z
    gamma = np.empty(n + 1, dtype=complex)
    gamma[0] = mz.sum()
    gamma[1:] = delta + _sym(r**2, n) @ mz
    return np.concatenate([g, [f], gamma])


def system_jacobian(v: np.ndarray, n: int, two_a: int) -> np.ndarray:
    """Analytic Jacobian of :func:`system_equations`."""
    v = np.asarray(v, dtype=complex)
    r, z, delta, m = _split(v, n)
    q = r.size
    jac = np.zeros((q + n + 2, q + 2 * n + 1), dtype=complex)
    zc, dc, mc = q, q + n, q + n + 1  # column offsets
    for p, (i, j) in enumerate(pairs(n)):
        if two_a < 0:
            e = -two_a
            jac[p, p] = e * r[p] ** (e - 1) * (z[i] * z[j] + 1)
            jac[p, zc + i] = r[p] ** e * z[j]
            jac[p, zc + j] = r[p] ** e * z[i]
        else:
            jac[p, p] = two_a * r[p] ** (two_a - 1)
            jac[p, zc + i] = -z[j]
            jac[p, zc + j] = -z[i]
    jac[q, :q] = grad_cm_det(r, n)
    g0 = q + 1
    jac[g0, zc : zc + n] = m
    jac[g0, mc:] = z
    r2 = _sym(r**2, n)
    for l in range(n):
        row = g0 + 1 + l
        jac[row, dc] = 1
        jac[row, zc : zc + n] = m * r2[:, l]
        jac[row, mc:] = z * r2[:, l]
        for k in range(n):
            if k != l:
                jac[row, pair_index(k, l, n)] = 2 * m[k] * z[k] * r[pair_index(k, l, n)]
    return jac


class SystemValues(NamedTuple):
    g: np.ndarray
    f: complex
    gamma: np.ndarray

    @property
    def max_norm(self) -> float:
        return float(max(np.abs(self.g).max(), abs(self.f), np.abs(self.gamma).max()))


def system_residual(p: LiftedPoint) -> SystemValues:
    vals = system_equations(p.vector(), p.n, p.two_a)
    q = p.q
    return SystemValues(vals[:q], complex(vals[q]), vals[q + 1 :])


def jacobian(p: LiftedPoint) -> np.ndarray:
    """The ``(q+n+2) x (q+2n+1)`` Jacobian in the documented orderings."""
    if np.any(p.r == 0):
        raise DegenerateConfigurationError("lifted point lies on W1 (a distance is zero)")
    return system_jacobian(p.vector(), p.n, p.two_a)


def _grad_matrix(p: LiftedPoint) -> np.ndarray:
    return _sym(grad_cm_det(p.r, p.n).astype(complex), p.n)


def _psi_coefficients(p: LiftedPoint) -> np.ndarray:
    """Matrix ``C`` with ``Psi = C @ z``."""
    if np.any(p.r == 0):
        raise DegenerateConfigurationError("Psi is undefined on W1 (a distance is zero)")
    n, two_a = p.n, p.two_a
    grad = _grad_matrix(p)
    coef = np.zeros((n, n))
    for i, k in pairs(n):
        if two_a < 0:
            c = p.r[pair_index(i, k, n)] ** float(1 - two_a)
        else:
            c = np.prod(np.delete(p.r, pair_index(i, k, n)) ** float(two_a - 1))
        coef[i, k] = coef[k, i] = c
    return coef * grad


def psi_values(p: LiftedPoint) -> np.ndarray:
    """The polynomials ``Psi_1..Psi_n``.

    For ``a < 0``: ``Psi_i = sum_k R_ik^(1-2a) dF/dR_ik Z_k``.  For ``a > 0`` the
    negative power is cleared by the product of ``R^(2a-1)`` over every other
    pair, so ``Psi_i`` stays polynomial.
    """
    return _psi_coefficients(p) @ p.z


def lifted_alpha(p: LiftedPoint) -> complex:
    """Least-squares ``alpha`` with ``F_ij = alpha u_i u_j``, ``u = (Delta_0, m z)``."""
    u = np.concatenate([[p.delta0], p.m * p.z])
    cof = cofactor_matrix(bordered_matrix(p.r**2, p.n))
    outer = np.outer(u, u)
    good = np.abs(outer) > 1e-6 * np.abs(outer).max()
    return complex(np.sum(cof[good] * outer[good].conj()) / np.sum(np.abs(outer[good]) ** 2))


def psi_closed_form(p: LiftedPoint, alpha: Optional[complex] = None) -> np.ndarray:
    """``Psi_i`` evaluated through the rank-one cofactor identity (lifted points only)."""
    if alpha is None:
        alpha = lifted_alpha(p)
    n, two_a = p.n, p.two_a
    rr = _sym(p.r, n)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        k = np.arange(n) != i
        out[i] = 4 * alpha * p.m[i] * p.z[i] * np.sum(p.m[k] * rr[i, k] ** float(2 - two_a) * p.z[k] ** 2)
    if two_a > 0:
        out *= np.prod(p.r ** float(two_a - 1))
    return out


def _central_diff_grad(r: np.ndarray, n: int, rel_step: float = 1e-6) -> np.ndarray:
    out = np.empty(r.size)
    for p in range(r.size):
        h = rel_step * r[p]
        up, down = r.copy(), r.copy()
        up[p] += h
        down[p] -= h
        f_up = np.linalg.det(bordered_matrix(up**2, n))
        f_down = np.linalg.det(bordered_matrix(down**2, n))
        out[p] = (f_up - f_down) / (2 * h)
    return out


def grad_F_identity_check(p: LiftedPoint, fd_tol: float = 1e-6) -> float:
    """Relative deviation from ``dF/dR_ij = 4 alpha r_ij m_i z_i m_j z_j``.

    The analytic gradient is also compared with central differences of the
    Cayley-Menger determinant; a mismatch above ``fd_tol`` raises.
    """
    grad = grad_cm_det(p.r, p.n)
    fd = _central_diff_grad(p.r, p.n)
    gscale = np.abs(grad).max()
    fd_err = np.abs(grad - fd).max() / max(gscale, 1e-300)
    if fd_err > fd_tol:
        raise ConsistencyError(f"analytic dF/dR disagrees with finite differences ({fd_err:.3e})")
    alpha = lifted_alpha(p)
    i, j = np.triu_indices(p.n, k=1)
    mz = p.m * p.z
    rhs = 4 * alpha * p.r * mz[i] * mz[j]
    scale = max(gscale, np.abs(rhs).max())
    if scale == 0:
        return 0.0
    return float(np.abs(grad - rhs).max() / scale)


class WFlags(NamedTuple):
    w1: bool
    w2: bool
    w3: bool

    @property
    def any(self) -> bool:
        return self.w1 or self.w2 or self.w3


def w_membership(p: LiftedPoint, policy: str = "all_cofactors", tol: float = CERT_TOL) -> WFlags:
    """Membership in the excluded sets W1 (zero distance), W2 (vanishing
    cofactors) and W3 (all Psi vanish).

    ``policy`` selects whether W2 means *every* order-n cofactor vanishes
    (``all_cofactors``, the default) or *some* cofactor does (``any_cofactor``).
    """
    if policy not in ("all_cofactors", "any_cofactor"):
        raise InputError(f"unknown W2 policy {policy!r}")
    w1 = bool(np.any(p.r == 0))
    n = p.n
    cof = cofactor_matrix(bordered_matrix(p.r**2, n))
    cof_scale = max(1.0, np.abs(p.r).max()) ** (2 * (n - 1))
    small = np.abs(cof) <= tol * cof_scale
    w2 = bool(small.all()) if policy == "all_cofactors" else bool(small.any())
    if w1:
        return WFlags(True, w2, True)
    coef = _psi_coefficients(p)
    psi = coef @ p.z
    psi_scale = np.abs(coef).sum(axis=1).max() * np.abs(p.z).max()
    w3 = bool(np.abs(psi).max() <= tol * psi_scale)
    return WFlags(w1, w2, w3)


class HDeterminant(NamedTuple):
    det: complex
    closed_form: complex
    permutation: tuple[int, ...]

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.det), abs(self.closed_form))
        return 0.0 if scale == 0 else abs(self.det - self.closed_form) / scale


def h_submatrix_det(p: LiftedPoint, tol: float = CERT_TOL) -> HDeterminant:
    """Determinant of the leading ``(q+1) x (q+1)`` block of ``J(g, F)`` and its
    closed form in terms of ``Psi_1``.

    When ``Psi_1`` vanishes the bodies are relabelled so that the largest
    ``|Psi_i|`` comes first; the permutation used is returned.
    """
    psi = psi_values(p)
    biggest = np.abs(psi).max()
    if biggest == 0 or w_membership(p, tol=tol).w3:
        raise CertificationError("all Psi_i vanish: H(P) is singular for every labelling")
    perm = list(range(p.n))
    if abs(psi[0]) <= tol * biggest:
        lead = int(np.argmax(np.abs(psi)))
        perm[0], perm[lead] = perm[lead], perm[0]
        p = p.permuted(perm)
        psi = psi_values(p)
    q, two_a = p.q, p.two_a
    h = jacobian(p)[: q + 1, : q + 1]
    det = complex(np.linalg.det(h))
    if two_a < 0:
        closed = -((-two_a) ** (q - 1)) * psi[0] / np.prod(p.r)
    else:
        closed = two_a ** (q - 1) * psi[0]
    return HDeterminant(det, complex(closed), tuple(perm))


class JacobianRank(NamedTuple):
    rank: int
    local_dim_upper_bound: int


def jacobian_rank(p: LiftedPoint, tol: RankTolerance = DEFAULT_TOL) -> JacobianRank:
    jac = jacobian(p)
    rank = numerical_rank(jac, tol)
    return JacobianRank(rank, jac.shape[1] - rank)


def gamma_block_rank(p: LiftedPoint, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Rank of the ``(n+1) x (n+1)`` block of Gamma partials in ``(Delta, M)``."""
    q, n = p.q, p.n
    v = p.vector()
    block = system_jacobian(v, n, p.two_a)[q + 1 :, q + n :]
    return numerical_rank(block, tol)


def lift_point(
    x: Configuration, m, a: Exponent, tol: float = CERT_TOL, rank_tol: RankTolerance = DEFAULT_TOL
) -> tuple[LiftedPoint, LiftedPoint]:
    """The two lifted points ``P_x`` and its mirror for a Dziobek configuration.

    The configuration is first dilated to ``r0 = 1``; ``z = sqrt(kappa) w`` with
    the principal square root, so ``z`` is pure imaginary when ``kappa < 0``.
    """
    m = as_masses(m, x.n)
    a.require_nonzero()
    report = certify(x, m, a, tol, rank_tol)
    if report.dimension != x.n - 2:
        raise DimensionError(f"lifting needs dimension n-2={x.n - 2}, got {report.dimension}")
    if not report.central:
        raise CertificationError(f"not central: residual {report.residual:.3e}")
    r0_pow = report.lam / m.sum()
    if r0_pow <= 0:
        raise NormalizationError("lambda/M <= 0: no real dilation gives r0 = 1")
    r0 = r0_pow ** (1 / a.two_a)
    xn = x.scaled(1 / r0)
    dz = dziobek_data(xn, m, a, tol, rank_tol)
    z = np.sqrt(complex(dz.kappa)) * dz.w
    sq = np.sum(xn.points**2, axis=1)
    delta0 = -np.sum(sq * m * z)
    p = LiftedPoint(x.n, a.two_a, xn.distances, z, delta0, m, True)
    res = system_residual(p).max_norm
    if res > tol:
        raise CertificationError(f"lifted point misses the variety (residual {res:.3e})")
    return p, p.mirror()
