"""Command-line interface: ``cencon <subcommand> ...``.

Exit codes: 0 success, 1 domain failure (not central, wrong dimension, ...),
2 input error, 3 internal inconsistency between independent routes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import io
from ._linalg import DEFAULT_TOL
from .bounds import thom_milnor_cc_bound
from .cayley_menger import determinantal_membership, dimension_from_distances, mutual_distances
from .central import CERT_TOL, Exponent, as_masses, certify
from .errors import CenconError, ConsistencyError, InputError
from .geometry import config_dimension
from .solver import build_xm_system, moulton_solutions, recover_configuration, search
from .variety import (
    grad_F_identity_check,
    h_submatrix_det,
    jacobian,
    jacobian_rank,
    gamma_block_rank,
    lift_point,
    psi_values,
    system_residual,
    w_membership,
)

TOL_ENV = "CENCON_TOL"


def _complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def resolve_tol(flag: Optional[float]) -> float:
    if flag is not None:
        tol = flag
    elif os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError as exc:
            raise InputError(f"{TOL_ENV} is not a number: {os.environ[TOL_ENV]!r}") from exc
    else:
        tol = CERT_TOL
    if not np.isfinite(tol) or tol <= 0:
        raise InputError(f"tolerance must be positive, got {tol}")
    return tol


def _exponent(args, cfg: Optional[io.ConfigFile] = None) -> Exponent:
    if args.two_a is not None:
        return Exponent(args.two_a)
    if cfg is not None and cfg.exponent is not None:
        return cfg.exponent
    return Exponent.newtonian()


def _emit(data, args) -> None:
    text = io.write_json(data, getattr(args, "out", None))
    if getattr(args, "out", None) is None:
        print(text)


def write_jacobian_csv(jac: np.ndarray, path) -> None:
    """Row-major CSV; each entry is written as ``re+imj`` so ``complex()`` reads it."""
    with open(path, "w") as fh:
        for row in jac:
            fh.write(",".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in row) + "\n")


def cmd_verify(args) -> int:
    cfg = io.load_config(args.config)
    a = _exponent(args, cfg)
    report = certify(cfg.config, cfg.masses_or_equal(), a, resolve_tol(args.tol))
    _emit(report.to_json(), args)
    return 0 if report.central else 1


def cmd_lift(args) -> int:
    cfg = io.load_config(args.config)
    a = _exponent(args, cfg)
    tol = resolve_tol(args.tol)
    p, mirror = lift_point(cfg.config, cfg.masses_or_equal(), a, tol)
    flags = w_membership(p, args.policy_w2, tol)
    rank = jacobian_rank(p)
    h = h_submatrix_det(p, tol)
    diagnostics = {
        "system_residual": system_residual(p).max_norm,
        "psi_max": float(np.abs(psi_values(p)).max()),
        "w_flags": flags._asdict(),
        "jacobian_rank": rank.rank,
        "local_dim_bound": rank.local_dim_upper_bound,
        "gamma_block_rank": gamma_block_rank(p),
        "grad_F_identity": grad_F_identity_check(p),
        "detH": _complex(h.det),
        "detH_closed_form": _complex(h.closed_form),
        "detH_relative_error": h.relative_error,
        "detH_permutation": list(h.permutation),
    }
    if args.jacobian_csv:
        write_jacobian_csv(jacobian(p), args.jacobian_csv)
    if args.out:
        io.write_json(p.to_json(), args.out)
    print(json.dumps({"lifted_point": p.to_json(), "mirror": mirror.to_json(), "diagnostics": diagnostics}, indent=2))
    return 0


def cmd_solve(args) -> int:
    if args.masses is None:
        if args.n is None:
            raise InputError("give --n or --masses")
        masses = np.ones(args.n)
    else:
        masses = as_masses(args.masses, args.n)
    n = masses.size
    a = _exponent(args)
    if args.seeds < 1:
        raise InputError("--seeds must be at least 1")
    system = build_xm_system(n, masses, a)
    report = search(system, args.seeds, args.rng_seed, tol=resolve_tol(args.tol))
    data = report.to_json()
    summary = f"solutions: {len(report.solutions)}"
    if n >= 4:
        bound = thom_milnor_cc_bound(n, a)
        data["bound"] = str(bound.value)
        summary += f" (bound {bound.value})"
    _emit(data, args)
    print(summary, file=sys.stderr)
    return 0


def cmd_bound(args) -> int:
    print(thom_milnor_cc_bound(args.n, _exponent(args)).value)
    return 0


def cmd_dimension(args) -> int:
    data = io.read_json(args.file)
    if "points" in data:
        x = io.parse_config(data).config
        r = mutual_distances(x)
        via_config = config_dimension(x, DEFAULT_TOL)
    else:
        r = io.parse_distances(data)
        via_config = None
    via_cm = dimension_from_distances(r, DEFAULT_TOL)
    if via_config is None:
        via_config = config_dimension(recover_configuration(r, via_cm), DEFAULT_TOL)
    out = {"n": r.n, "delta_configuration": via_config, "delta_cayley_menger": via_cm}
    if via_config != via_cm:
        _emit(out, args)
        raise ConsistencyError(f"dimension routes disagree: {via_config} vs {via_cm}")
    mem = determinantal_membership(r, via_cm, DEFAULT_TOL)
    out["k"] = mem.k
    out[f"in_N{mem.k + 3}"] = mem.in_n_k3
    out[f"in_N{mem.k + 2}"] = mem.in_n_k2
    _emit(out, args)
    return 0


def cmd_moulton(args) -> int:
    masses = as_masses(args.masses)
    a = _exponent(args)
    tol = min(resolve_tol(args.tol), 1e-10)
    out = []
    for perm, x in moulton_solutions(masses, a, tol):
        rep = certify(x, masses, a, tol)
        out.append(
            {
                "ordering": list(perm),
                "points": x.points[:, 0].tolist(),
                "r": x.distances.tolist(),
                "lambda": rep.lam,
                "residual": rep.residual,
            }
        )
    _emit({"n": masses.size, "two_a": a.two_a, "masses": masses.tolist(), "solutions": out}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cencon", description="Central configurations: certification, lifting, search and bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        p.add_argument("--two-a", type=int, default=None, help="exponent as the integer 2a (default: file value or -3)")
        p.add_argument("--tol", type=float, default=None, help=f"certification tolerance (env {TOL_ENV}, default {CERT_TOL:g})")
        p.add_argument("--out", default=None, help="write JSON output here instead of stdout")
        if config:
            p.add_argument("config", help="configuration JSON file")

    p = sub.add_parser("verify", help="certify a configuration as central")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lift", help="lift a Dziobek configuration and report variety diagnostics")
    common(p)
    p.add_argument("--policy-w2", choices=["all_cofactors", "any_cofactor"], default="all_cofactors")
    p.add_argument("--jacobian-csv", default=None, help="dump the Jacobian (row-major CSV)")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("solve", help="random-restart search for Dziobek configurations")
    common(p, config=False)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--masses", type=float, nargs="+", default=None)
    p.add_argument("--seeds", type=int, default=500)
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bound", help="counting bound for n >= 4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--two-a", type=int, default=None)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("dimension", help="configuration dimension by two independent routes")
    p.add_argument("file", help="configuration or distance JSON file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("moulton", help="collinear central configurations for every ordering")
    common(p, config=False)
    p.add_argument("--masses", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_moulton)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CenconError as exc:
        print(f"cencon: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
