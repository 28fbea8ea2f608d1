"""Numerical search for Dziobek central configurations and collinear solutions.

The search works on the real square system in ``(r, kappa, w)``::

    g_ij    = r_ij^(-2a) (1 + kappa w_i w_j) - 1     (a < 0)
            = r_ij^(2a) - 1 - kappa w_i w_j          (a > 0)
    F       = det A(r^2)
    Omega_0 = sum_k m_k w_k
    Omega_i - Omega_(i+1),  Omega_i = sum_k m_k w_k r_ki^2

The system is invariant under ``(kappa, w) -> (kappa / t^2, t w)``, so its
roots form curves and the Jacobian is rank deficient along them.  Newton steps
are therefore minimum-norm least-squares steps, and each converged root is
moved to the gauge where ``w_i = Delta_i / m_i`` for the recovered
configuration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from ._linalg import DEFAULT_TOL, RankTolerance
from .cayley_menger import DistanceVector, bordered_matrix, cm_rank, dimension_from_distances, grad_cm_det
from .central import CERT_TOL, Exponent, as_masses, cc_residual, certify, fit_lambda
from .errors import CenconError, DimensionError, InputError, NonRealizableError, SolverError
from .geometry import Configuration, pair_index, pairs
from .variety import jacobian_rank, lift_point

__all__ = [
    "XmSystem",
    "NewtonOptions",
    "NewtonResult",
    "Solution",
    "SolveReport",
    "build_xm_system",
    "newton_solve",
    "search",
    "moulton_collinear",
    "moulton_solutions",
    "recover_configuration",
]

RNG_NAME = "numpy.random.Philox"


@dataclass(frozen=True, eq=False)
class XmSystem:
    n: int
    two_a: int
    m: np.ndarray

    @property
    def q(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def n_vars(self) -> int:
        return self.q + self.n + 1

    @property
    def n_eqs(self) -> int:
        return self.q + 1 + 1 + (self.n - 1)

    def split(self, v):
        q = self.q
        return v[:q], v[q], v[q + 1 :]

    def _omega(self, r, w):
        n = self.n
        r2 = np.zeros((n, n))
        i, j = np.triu_indices(n, k=1)
        r2[i, j] = r2[j, i] = r**2
        return r2 @ (self.m * w), r2

    def residual(self, v: np.ndarray) -> np.ndarray:
        r, kappa, w = self.split(np.asarray(v, dtype=float))
        n = self.n
        i, j = np.triu_indices(n, k=1)
        kww = kappa * w[i] * w[j]
        if self.two_a < 0:
            g = r ** float(-self.two_a) * (1 + kww) - 1
        else:
            g = r ** float(self.two_a) - 1 - kww
        f = np.linalg.det(bordered_matrix(r**2, n))
        omega, _ = self._omega(r, w)
        return np.concatenate([g, [f, self.m @ w], omega[:-1] - omega[1:]])

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        r, kappa, w = self.split(np.asarray(v, dtype=float))
        n, q, m = self.n, self.q, self.m
        jac = np.zeros((self.n_eqs, self.n_vars))
        kc, wc = q, q + 1
        for p, (i, j) in enumerate(pairs(n)):
            ww = w[i] * w[j]
            if self.two_a < 0:
                e = -self.two_a
                re = r[p] ** e
                jac[p, p] = e * r[p] ** (e - 1) * (1 + kappa * ww)
                jac[p, kc] = re * ww
                jac[p, wc + i] = re * kappa * w[j]
                jac[p, wc + j] = re * kappa * w[i]
            else:
                jac[p, p] = self.two_a * r[p] ** (self.two_a - 1)
                jac[p, kc] = -ww
                jac[p, wc + i] = -kappa * w[j]
                jac[p, wc + j] = -kappa * w[i]
        jac[q, :q] = grad_cm_det(r, n)
        jac[q + 1, wc:] = m
        _, r2 = self._omega(r, w)
        # d Omega_l: w-columns m_k r_kl^2, r-columns 2 m_k w_k r_kl
        d_omega = np.zeros((n, self.n_vars))
        for l in range(n):
            d_omega[l, wc:] = m * r2[:, l]
            for k in range(n):
                if k != l:
                    p = pair_index(k, l, n)
                    d_omega[l, p] = 2 * m[k] * w[k] * r[p]
        jac[q + 2 :] = d_omega[:-1] - d_omega[1:]
        return jac

    def degrees(self) -> list[int]:
        """Total degree of each equation in ``(r, kappa, w)``."""
        g_deg = -self.two_a + 3 if self.two_a < 0 else max(self.two_a, 3)
        return [g_deg] * self.q + [2 * (self.n - 1), 1] + [3] * (self.n - 1)


def build_xm_system(n: int, m, a: Exponent) -> XmSystem:
    if n < 3:
        raise InputError(f"the Dziobek system needs n >= 3, got {n}")
    a.require_nonzero()
    return XmSystem(n, a.two_a, as_masses(m, n))


@dataclass(frozen=True)
class NewtonOptions:
    max_iter: int = 60
    tol: float = 1e-11
    damping: str = "backtracking"  # or "none"
    min_step: float = 1.0 / 1024
    max_norm: float = 1e6


@dataclass
class NewtonResult:
    success: bool
    x: np.ndarray
    residual: float
    iterations: int
    reason: str = ""


def newton_solve(sys: XmSystem, seed, opts: NewtonOptions = NewtonOptions()) -> NewtonResult:
    """Damped Newton iteration with minimum-norm least-squares steps."""
    x = np.array(seed, dtype=float)
    q = sys.q
    if x.shape != (sys.n_vars,):
        raise InputError(f"seed must have {sys.n_vars} entries")
    if np.any(x[:q] <= 0):
        raise InputError("seed distances must be positive")
    f = sys.residual(x)
    res = np.abs(f).max()
    for it in range(opts.max_iter):
        if res <= opts.tol:
            # one extra step usually buys a few more digits
            step = np.linalg.lstsq(sys.jacobian(x), -f, rcond=None)[0]
            cand = x + step
            if np.all(cand[:q] > 0):
                fc = sys.residual(cand)
                if np.abs(fc).max() < res:
                    x, f, res = cand, fc, np.abs(fc).max()
            return NewtonResult(True, x, float(res), it)
        step = np.linalg.lstsq(sys.jacobian(x), -f, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return NewtonResult(False, x, float(res), it, "singular Jacobian")
        t = 1.0
        norm = np.linalg.norm(f)
        while True:
            cand = x + t * step
            if np.all(cand[:q] > 0):
                fc = sys.residual(cand)
                if opts.damping == "none" or np.linalg.norm(fc) < norm:
                    break
            t /= 2
            if t < opts.min_step:
                reason = "distance sign violation" if np.any(cand[:q] <= 0) else "line search failed"
                return NewtonResult(False, x, float(res), it, reason)
        x, f = cand, fc
        res = np.abs(f).max()
        if np.abs(x).max() > opts.max_norm:
            return NewtonResult(False, x, float(res), it + 1, "divergence")
    if res <= opts.tol:
        return NewtonResult(True, x, float(res), opts.max_iter)
    return NewtonResult(False, x, float(res), opts.max_iter, "iteration limit")


def recover_configuration(r: DistanceVector, k: int, rel_tol: float = 1e-8) -> Configuration:
    """Classical multidimensional scaling into ``R^k``.

    The result is centred at the origin, uses principal axes in decreasing
    order of spread, and has each axis oriented so that its first clearly
    nonzero coordinate is positive.
    """
    try:
        dim = dimension_from_distances(r)
    except InputError as exc:
        raise NonRealizableError(str(exc)) from exc
    if dim != k:
        raise DimensionError(f"distances have Cayley-Menger dimension {dim}, expected {k}")
    n = r.n
    d2 = r.matrix() ** 2
    centring = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centring @ d2 @ centring
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    top = evals[0]
    if top <= 0 or evals[k - 1] <= rel_tol * top:
        raise NonRealizableError("Gram matrix has fewer than k positive eigenvalues")
    if np.any(np.abs(evals[k:]) > rel_tol * top):
        raise NonRealizableError(f"Gram matrix is not positive semidefinite of rank {k}")
    pts = evecs[:, :k] * np.sqrt(evals[:k])
    for c in range(k):
        col = pts[:, c]
        lead = np.flatnonzero(np.abs(col) > rel_tol * np.abs(col).max())[0]
        if col[lead] < 0:
            pts[:, c] = -col
    x = Configuration(pts)
    err = np.abs(x.distances - r.r).max() / r.r.max()
    if err > rel_tol:
        raise NonRealizableError(f"recovered distances deviate by {err:.3e}")
    return x


@dataclass
class Solution:
    r: np.ndarray
    kappa: float
    w: np.ndarray
    residual: float
    cm_rank: int
    jacobian_rank_at_lift: Optional[int]
    classification: dict
    points: np.ndarray
    certification: dict
    seed_index: int
    labeled_variants: int = 1

    def sorted_r(self) -> np.ndarray:
        return np.sort(self.r)

    def configuration(self) -> Configuration:
        return Configuration(self.points)

    def to_json(self) -> dict:
        return {
            "r": self.r.tolist(),
            "kappa": self.kappa,
            "w": self.w.tolist(),
            "residual": self.residual,
            "cm_rank": self.cm_rank,
            "jacobian_rank_at_lift": self.jacobian_rank_at_lift,
            "classification": self.classification,
            "points": self.points.tolist(),
            "certification": self.certification,
            "seed_index": self.seed_index,
            "labeled_variants": self.labeled_variants,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Solution":
        return cls(
            r=np.asarray(d["r"], dtype=float),
            kappa=float(d["kappa"]),
            w=np.asarray(d["w"], dtype=float),
            residual=float(d["residual"]),
            cm_rank=int(d["cm_rank"]),
            jacobian_rank_at_lift=d.get("jacobian_rank_at_lift"),
            classification=dict(d.get("classification", {})),
            points=np.asarray(d["points"], dtype=float),
            certification=dict(d.get("certification", {})),
            seed_index=int(d.get("seed_index", -1)),
            labeled_variants=int(d.get("labeled_variants", 1)),
        )


@dataclass
class SolveReport:
    n: int
    two_a: int
    masses: np.ndarray
    rng_seed: int
    seeds_tried: int
    dedup_tolerance: float
    solutions: list[Solution] = field(default_factory=list)
    converged: int = 0
    rejected: dict = field(default_factory=dict)
    generator: str = RNG_NAME

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "two_a": self.two_a,
            "masses": self.masses.tolist(),
            "rng": {"generator": self.generator, "seed": self.rng_seed},
            "seeds_tried": self.seeds_tried,
            "dedup_tolerance": self.dedup_tolerance,
            "converged": self.converged,
            "rejected": dict(self.rejected),
            "solutions": [s.to_json() for s in self.solutions],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SolveReport":
        try:
            return cls(
                n=int(d["n"]),
                two_a=int(d["two_a"]),
                masses=np.asarray(d["masses"], dtype=float),
                rng_seed=int(d["rng"]["seed"]),
                seeds_tried=int(d["seeds_tried"]),
                dedup_tolerance=float(d["dedup_tolerance"]),
                solutions=[Solution.from_json(s) for s in d["solutions"]],
                converged=int(d.get("converged", 0)),
                rejected=dict(d.get("rejected", {})),
                generator=d["rng"].get("generator", RNG_NAME),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed solve report: {exc}") from exc


def _sample_seed(rng: np.random.Generator, sys: XmSystem) -> np.ndarray:
    r = np.exp(rng.uniform(np.log(0.5), np.log(2.0), sys.q))
    kappa = 0.0
    while abs(kappa) < 0.05:
        kappa = rng.uniform(-1.0, 1.0)
    w = rng.uniform(-1.0, 1.0, sys.n)
    return np.concatenate([r, [kappa], w])


def _classify(sys: XmSystem, v: np.ndarray, seed_index: int, tol: float, rank_tol: RankTolerance):
    """Certify a converged root; returns a Solution or the rejection reason."""
    n = sys.n
    a = Exponent(sys.two_a)
    r, kappa, w = sys.split(v)
    wmax = np.abs(w).max()
    if wmax == 0 or np.count_nonzero(np.abs(w) > 1e-8 * wmax) < 2:
        return "degenerate w"
    dv = DistanceVector(r)
    rank = cm_rank(dv, rank_tol)
    if rank != n:
        return "cayley-menger rank"
    try:
        x = recover_configuration(dv, n - 2)
    except (NonRealizableError, DimensionError):
        return "not realizable"
    report = certify(x, sys.m, a, tol, rank_tol)
    if not report.central or report.dziobek is None:
        return "not certified"
    dz = report.dziobek
    t = (w @ dz.w) / (w @ w)
    w_c, kappa_c = t * w, kappa / t**2
    if np.abs(w_c - dz.w).max() > 1e-6 * np.abs(dz.w).max() or abs(kappa_c - dz.kappa) > 1e-6 * abs(dz.kappa):
        return "gauge mismatch"
    canonical = np.concatenate([r, [kappa_c], w_c])
    residual = float(np.abs(sys.residual(canonical)).max())
    if residual > 1e-10:
        return "residual after gauge fix"
    try:
        jrank = jacobian_rank(lift_point(x, sys.m, a, tol, rank_tol)[0], rank_tol).rank
    except CenconError:
        jrank = None
    classification = {
        "realizable": True,
        "dimension": report.dimension,
        "central": True,
        "dziobek": True,
        "collinear": report.dimension == 1,
    }
    return Solution(
        r=r.copy(),
        kappa=float(kappa_c),
        w=w_c,
        residual=residual,
        cm_rank=rank,
        jacobian_rank_at_lift=jrank,
        classification=classification,
        points=x.points.copy(),
        certification=report.to_json(),
        seed_index=seed_index,
    )


def search(
    sys: XmSystem,
    num_seeds: int,
    rng_seed: int,
    opts: NewtonOptions = NewtonOptions(),
    dedup_tol: float = 1e-6,
    tol: float = CERT_TOL,
    rank_tol: RankTolerance = DEFAULT_TOL,
) -> SolveReport:
    """Random-restart Newton search; lists only certified, distinct solutions.

    Seeds come from a counter-based Philox generator: distances log-uniform in
    ``[0.5, 2]``, ``w`` uniform in ``[-1, 1]`` and ``kappa`` uniform in
    ``[-1, 1]`` away from zero.  Solutions are identified when their sorted
    distance vectors agree within ``dedup_tol`` (relative); the number of
    distinct labelled distance vectors in each class is kept as
    ``labeled_variants``.
    """
    if num_seeds < 1:
        raise InputError("num_seeds must be at least 1")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    report = SolveReport(sys.n, sys.two_a, sys.m.copy(), int(rng_seed), num_seeds, dedup_tol)
    labeled: list[list[np.ndarray]] = []
    for idx in range(num_seeds):
        seed = _sample_seed(rng, sys)
        result = newton_solve(sys, seed, opts)
        if not result.success:
            continue
        report.converged += 1
        sol = _classify(sys, result.x, idx, tol, rank_tol)
        if isinstance(sol, str):
            report.rejected[sol] = report.rejected.get(sol, 0) + 1
            continue
        key = sol.sorted_r()
        for k, known in enumerate(report.solutions):
            if np.abs(known.sorted_r() - key).max() <= dedup_tol * key.max():
                if not any(np.abs(v - sol.r).max() <= dedup_tol * key.max() for v in labeled[k]):
                    labeled[k].append(sol.r)
                    known.labeled_variants += 1
                break
        else:
            report.solutions.append(sol)
            labeled.append([sol.r])
    return report


def _collinear_positions(theta: np.ndarray) -> np.ndarray:
    logits = np.concatenate(([0.0], theta))
    gaps = np.exp(logits - logits.max())
    gaps /= gaps.sum()
    return np.concatenate(([0.0], np.cumsum(gaps)))


def _collinear_newton_system(pts, lam, m, two_a):
    """Residuals and Jacobian in the interior positions and lambda (ends pinned)."""
    n = pts.size
    diff = pts[None, :] - pts[:, None]  # diff[j, i] = x_i - x_j
    dist = np.abs(diff)
    np.fill_diagonal(dist, 1.0)
    pw = dist ** float(two_a)
    np.fill_diagonal(pw, 0.0)
    centre = m @ pts / m.sum()
    f = (m[None, :] * diff * pw).sum(axis=1) + lam * (pts - centre)
    # d/dx of (x_i - x_j)|x_i - x_j|^(2a) is (2a + 1)|x_i - x_j|^(2a)
    dk = (two_a + 1) * m[None, :] * pw
    jac_x = dk - np.diag(dk.sum(axis=1)) + lam * (np.eye(n) - m[None, :] / m.sum())
    return f, np.column_stack([jac_x, pts - centre])


def _polish_collinear(x: Configuration, m, a: Exponent, ordering, iters: int = 8) -> Configuration:
    line = x.points[:, 0]
    order = np.asarray(ordering)
    pts = line.copy()
    lam = fit_lambda(x, m, a)
    inner = order[1:-1]
    for _ in range(iters):
        f, jac = _collinear_newton_system(pts, lam, m, a.two_a)
        cols = np.concatenate([inner, [pts.size]])
        step = np.linalg.lstsq(jac[:, cols], -f, rcond=None)[0]
        cand = pts.copy()
        cand[inner] += step[:-1]
        if np.any(np.diff(cand[order]) <= 0):
            break
        pts, lam = cand, lam + step[-1]
        if np.abs(step).max() < 1e-16:
            break
    return Configuration(pts[:, None])


def moulton_collinear(m, a: Exponent, ordering: Optional[Sequence[int]] = None, tol: float = 1e-10) -> Configuration:
    """The collinear central configuration with bodies in the given left-to-right order.

    Positions are normalised to span ``[0, 1]``; the ``n - 1`` gaps are
    parametrised by ``n - 2`` free log-ratios and fitted by damped Gauss-Newton
    (Levenberg-Marquardt), then polished by Newton in the positions and lambda.
    Existence and uniqueness hold for ``a < 0``; for ``a > 0`` an ordering may
    admit no collinear solution and the solve then fails with SolverError.
    """
    m = as_masses(m)
    n = m.size
    if n < 2:
        raise InputError("need at least two bodies")
    ordering = list(range(n)) if ordering is None else [int(i) for i in ordering]
    if sorted(ordering) != list(range(n)):
        raise InputError(f"ordering must be a permutation of 0..{n - 1}")

    def place(theta):
        coords = np.empty(n)
        coords[ordering] = _collinear_positions(theta)
        return Configuration(coords[:, None])

    if n == 2:
        return place(np.zeros(0))

    def residuals(theta):
        x = place(theta)
        lam = fit_lambda(x, m, a)
        dist = x.distance_matrix()
        pts = x.points[:, 0]
        diff = pts[None, :] - pts[:, None]
        with np.errstate(divide="ignore"):
            wgt = np.where(dist > 0, dist ** float(a.two_a), 0.0) * m[None, :]
        pull = (wgt * diff).sum(axis=1)
        centre = m @ pts / m.sum()
        return pull + lam * (pts - centre)

    best = None
    for start in (np.zeros(n - 2), np.linspace(-0.5, 0.5, n - 2), np.linspace(0.5, -0.5, n - 2)):
        fit = least_squares(residuals, start, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=5000)
        x = _polish_collinear(place(fit.x), m, a, ordering)
        res = cc_residual(x, m, a, fit_lambda(x, m, a))
        if best is None or res < best[1]:
            best = (x, res)
        if res <= tol:
            return x
    raise SolverError(f"collinear solve did not converge (residual {best[1]:.3e})")


def moulton_solutions(m, a: Exponent, tol: float = 1e-10) -> list[tuple[tuple[int, ...], Configuration]]:
    """One collinear central configuration per ordering up to reversal."""
    m = as_masses(m)
    n = m.size
    out = []
    for perm in itertools.permutations(range(n)):
        if perm[0] > perm[-1]:
            continue
        out.append((perm, moulton_collinear(m, a, perm, tol)))
    return out
