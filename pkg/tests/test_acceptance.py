"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible in ``-v``
runs and in the saved test log) before asserting.
"""

import time

import numpy as np
import pytest

from cencon import (
    Configuration,
    DistanceVector,
    Exponent,
    build_xm_system,
    cc_residual,
    certify,
    cm_det,
    cm_rank,
    config_dimension,
    fit_lambda,
    grad_F_identity_check,
    gwf_residuals,
    h_submatrix_det,
    jacobian,
    jacobian_rank,
    lift_point,
    mutual_distances,
    psi_values,
    search,
    system_residual,
    thom_milnor_cc_bound,
    w_membership,
)
from cencon._linalg import numerical_rank
from cencon.cayley_menger import grad_cm_det
from cencon.central import cofactor_factorization
from cencon.solver import moulton_solutions
from cencon.variety import LiftedPoint, system_equations

from conftest import equilateral, random_config, regular_simplex

NEWTON = Exponent(-3)
SEARCH_SEED = 20261014
SQUARE_PATTERN = np.array([1, 1, 1, 1, np.sqrt(2), np.sqrt(2)])
TRIANGLE_CENTER_PATTERN = np.array([1, 1, 1, np.sqrt(3), np.sqrt(3), np.sqrt(3)])


def announce(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def moulton_certs():
    start = time.perf_counter()
    sols = moulton_solutions([1, 2, 3], NEWTON)
    equal = moulton_solutions([1, 1, 1], NEWTON)
    elapsed = time.perf_counter() - start
    return sols, equal, elapsed


@pytest.fixture(scope="module")
def search_report():
    start = time.perf_counter()
    rep = search(build_xm_system(4, np.ones(4), NEWTON), 500, SEARCH_SEED)
    return rep, time.perf_counter() - start


@pytest.fixture(scope="module")
def dziobek_certs(moulton_certs, search_report):
    """Every certified Dziobek configuration from the Moulton and search criteria."""
    certs = []
    for perm, x in moulton_certs[0]:
        certs.append((f"moulton{perm}", x, np.array([1.0, 2.0, 3.0])))
    for perm, x in moulton_certs[1]:
        certs.append((f"moulton_equal{perm}", x, np.ones(3)))
    for idx, sol in enumerate(search_report[0].solutions):
        certs.append((f"search{idx}", sol.configuration(), np.ones(4)))
    for _, x, m in certs:
        rep = certify(x, m, NEWTON)
        assert rep.central and rep.dziobek is not None
    return certs


def matches(sol_r, pattern, tol=1e-6):
    r = np.sort(sol_r)
    return np.abs(r / r[0] - pattern).max() <= tol


def test_criterion_01_lagrange_saari(capsys):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_res, worst_lam = 0.0, 0.0
    cases = []
    for _ in range(20):
        cases.append((equilateral(side=rng.uniform(0.5, 2.0)), rng.uniform(0.1, 10.0, 3)))
    for n in (4, 5):
        side = rng.uniform(0.5, 2.0)
        cases.append((regular_simplex(n, side), np.ones(n)))
        cases.append((regular_simplex(n, side), rng.uniform(0.1, 10.0, n)))
    for x, m in cases:
        s = x.distances[0]
        for two_a in (-3, -2, -1, 1, 2, 3):
            a = Exponent(two_a)
            lam = fit_lambda(x, m, a)
            expected = m.sum() * s**two_a
            worst_lam = max(worst_lam, abs(lam - expected) / expected)
            worst_res = max(worst_res, cc_residual(x, m, a, lam))
    elapsed = time.perf_counter() - start
    ok = worst_res <= 1e-10 and worst_lam <= 1e-10 and elapsed < 1.0
    announce(capsys, 1, ok, f"max residual {worst_res:.2e}, max lambda error {worst_lam:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_02_cayley_menger_rank(capsys):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    failures = 0
    total = 0
    for n in range(3, 8):
        for k in range(1, n):
            for _ in range(100):
                x = random_config(rng, n, k)
                total += 1
                if cm_rank(mutual_distances(x)) != config_dimension(x) + 2:
                    failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 10.0
    announce(capsys, 2, ok, f"{total - failures}/{total} configurations with rank = dimension + 2, {elapsed:.2f} s")
    assert ok


def test_criterion_03_trilinear(capsys, dziobek_certs):
    # the simplices of criterion 1 have dimension n - 1, so they carry no
    # Dziobek certificate; the certificates come from criteria 5 and 6
    worst = max(gwf_residuals(x, m, NEWTON, 2) for _, x, m in dziobek_certs)
    ok = worst <= 1e-8
    announce(capsys, 3, ok, f"{len(dziobek_certs)} certificates, max residual {worst:.2e}")
    assert ok


def test_criterion_04_cofactor_factorization(capsys, dziobek_certs):
    facs = [cofactor_factorization(x) for _, x, _ in dziobek_certs]
    worst = max(f.deviation for f in facs)
    ranks = {numerical_rank(f.cofactors) for f in facs}
    ok = worst <= 1e-8 and ranks == {1}
    announce(capsys, 4, ok, f"max deviation {worst:.2e}, cofactor ranks {sorted(ranks)}")
    assert ok


def test_criterion_05_moulton(capsys, moulton_certs):
    sols, equal, elapsed = moulton_certs
    m = np.array([1.0, 2.0, 3.0])
    shapes = {tuple(np.round(np.sort(x.distances) / x.distances.max(), 8)) for _, x in sols}
    residuals = [cc_residual(x, m, NEWTON, fit_lambda(x, m, NEWTON)) for _, x in sols]
    mid = equal[0][1].points[:, 0]
    mid_ok = abs(np.sort(mid)[1] - 0.5 * (mid.min() + mid.max())) < 1e-12
    ok = len(sols) == 3 and len(shapes) == 3 and max(residuals) <= 1e-10 and mid_ok and elapsed < 1.0
    announce(
        capsys, 5, ok, f"{len(shapes)} distinct solutions, max residual {max(residuals):.2e}, midpoint {mid_ok}, {elapsed:.3f} s"
    )
    assert ok


def test_criterion_06_dziobek_search(capsys, search_report):
    rep, elapsed = search_report
    square = any(matches(s.r, SQUARE_PATTERN) for s in rep.solutions)
    tri = any(matches(s.r, TRIANGLE_CENTER_PATTERN) for s in rep.solutions)
    recert = [
        cc_residual(s.configuration(), np.ones(4), NEWTON, fit_lambda(s.configuration(), np.ones(4), NEWTON))
        for s in rep.solutions
    ]
    ok = square and tri and max(recert) <= 1e-8 and elapsed < 60.0
    announce(
        capsys,
        6,
        ok,
        f"{len(rep.solutions)} solutions, square {square}, triangle+centre {tri}, max recert {max(recert):.2e}, {elapsed:.1f} s",
    )
    assert ok


def test_criterion_07_lift_diagnostics(capsys, dziobek_certs):
    worst_res, worst_grad, flags_ok, psi_ok = 0.0, 0.0, True, True
    for _, x, m in dziobek_certs:
        p, _ = lift_point(x, m, NEWTON)
        worst_res = max(worst_res, system_residual(p).max_norm)
        flags_ok &= not w_membership(p).any
        psi_ok &= bool(np.abs(psi_values(p)).max() > 0)
        worst_grad = max(worst_grad, grad_F_identity_check(p))
    ok = worst_res <= 1e-8 and flags_ok and psi_ok and worst_grad <= 1e-8
    announce(
        capsys,
        7,
        ok,
        f"max system residual {worst_res:.2e}, W flags clear {flags_ok}, Psi nonzero {psi_ok}, grad identity {worst_grad:.2e}",
    )
    assert ok


def test_criterion_08_jacobian_rank(capsys, dziobek_certs):
    rank_ok, worst = True, 0.0
    for _, x, m in dziobek_certs:
        p, _ = lift_point(x, m, NEWTON)
        q, n = p.q, p.n
        jr = jacobian_rank(p)
        rank_ok &= jr.rank >= q + n + 1 and jr.local_dim_upper_bound <= n
        h = h_submatrix_det(p)
        moved = p.permuted(h.permutation)
        e = -NEWTON.two_a
        closed = -(e ** (q - 1)) * psi_values(moved)[0] / np.prod(moved.r)
        det = np.linalg.det(jacobian(moved)[: q + 1, : q + 1])
        worst = max(worst, abs(det - closed) / max(abs(det), abs(closed)))
    ok = rank_ok and worst <= 1e-8
    announce(capsys, 8, ok, f"rank bound holds {rank_ok}, max det H relative error {worst:.2e}")
    assert ok


def test_criterion_09_finite_difference_audit(capsys):
    rng = np.random.default_rng(9)
    worst_jac, worst_grad = 0.0, 0.0
    for trial in range(20):
        n = 3 + trial % 3
        q = n * (n - 1) // 2
        two_a = [-3, -1, 2, 3][trial % 4]
        r = rng.uniform(0.5, 2.0, q)
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        p = LiftedPoint(n, two_a, r, z, complex(rng.normal(), rng.normal()), rng.uniform(0.5, 2.0, n))
        v = p.vector()
        ana = jacobian(p)
        for k in range(v.size):
            h = 1e-6 * max(1.0, abs(v[k]))
            e = np.zeros(v.size)
            e[k] = h
            col = (system_equations(v + e, n, two_a) - system_equations(v - e, n, two_a)) / (2 * h)
            for row in range(ana.shape[0]):
                scale = np.abs(ana[row]).max()
                worst_jac = max(worst_jac, abs(col[row] - ana[row, k]) / scale)
        grad = grad_cm_det(r, n)
        for k in range(q):
            h = 1e-6 * r[k]
            up, down = r.copy(), r.copy()
            up[k] += h
            down[k] -= h
            fd = (cm_det(DistanceVector(up)) - cm_det(DistanceVector(down))) / (2 * h)
            worst_grad = max(worst_grad, abs(fd - grad[k]) / np.abs(grad).max())
    ok = worst_jac <= 1e-6 and worst_grad <= 1e-6
    announce(capsys, 9, ok, f"max Jacobian deviation {worst_jac:.2e}, max dF/dR deviation {worst_grad:.2e}")
    assert ok


def test_criterion_10_bound(capsys, search_report):
    start = time.perf_counter()
    res = thom_milnor_cc_bound(4, Exponent(-3))
    elapsed = time.perf_counter() - start
    count = len(search_report[0].solutions)
    ok = str(res) == "4613203125000" and res.value == 8 * 15**10 and count <= res.value and elapsed < 1e-3
    announce(capsys, 10, ok, f"bound {res}, solver count {count}, {elapsed * 1e6:.1f} us")
    assert ok
