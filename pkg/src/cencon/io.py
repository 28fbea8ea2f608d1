"""JSON readers and writers for configurations, distances, lifts and reports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .cayley_menger import DistanceVector
from .central import CertificationReport, DziobekData, Exponent, as_masses
from .errors import InputError
from .geometry import Configuration
from .solver import SolveReport
from .variety import LiftedPoint

__all__ = [
    "ConfigFile",
    "parse_config",
    "config_to_json",
    "parse_distances",
    "distances_to_json",
    "parse_report",
    "read_json",
    "write_json",
    "load_config",
    "load_distances",
    "load_lifted_point",
    "load_solve_report",
]

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class ConfigFile:
    config: Configuration
    masses: Optional[np.ndarray] = None
    exponent: Optional[Exponent] = None

    def masses_or_equal(self) -> np.ndarray:
        return np.ones(self.config.n) if self.masses is None else self.masses


def read_json(path: PathLike) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def write_json(data: dict, path: Optional[PathLike] = None) -> str:
    text = json.dumps(data, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def parse_config(data: dict) -> ConfigFile:
    try:
        points = np.asarray(data["points"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"configuration needs a numeric 'points' array: {exc}") from exc
    x = Configuration(points)
    if "n" in data and int(data["n"]) != x.n:
        raise InputError(f"'n' is {data['n']} but {x.n} points were given")
    if "d" in data and int(data["d"]) != x.d:
        raise InputError(f"'d' is {data['d']} but points have dimension {x.d}")
    masses = as_masses(data["masses"], x.n) if data.get("masses") is not None else None
    exponent = Exponent(data["two_a"]) if data.get("two_a") is not None else None
    return ConfigFile(x, masses, exponent)


def config_to_json(x: Configuration, masses=None, exponent: Optional[Exponent] = None) -> dict:
    out = {"n": x.n, "d": x.d, "points": x.points.tolist()}
    if masses is not None:
        out["masses"] = as_masses(masses, x.n).tolist()
    if exponent is not None:
        out["two_a"] = exponent.two_a
    return out


def parse_distances(data: dict) -> DistanceVector:
    try:
        r = DistanceVector(np.asarray(data["r"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"distance file needs a numeric 'r' array: {exc}") from exc
    if "n" in data and int(data["n"]) != r.n:
        raise InputError(f"'n' is {data['n']} but {r.q} distances imply n={r.n}")
    return r


def distances_to_json(r: DistanceVector) -> dict:
    return {"n": r.n, "r": r.r.tolist()}


def parse_report(data: dict) -> CertificationReport:
    try:
        dz = None
        if "dziobek" in data:
            d = data["dziobek"]
            dz = DziobekData(
                delta=np.asarray(d["delta"], dtype=float),
                w=np.asarray(d["w"], dtype=float),
                kappa=float(d["kappa"]),
                lam=float(d["lambda"]),
                r0_pow=float(d["r0_pow"]),
                consistency=float(d.get("consistency", 0.0)),
                r0=None if d.get("r0") is None else float(d["r0"]),
            )
        return CertificationReport(
            central=bool(data["central"]),
            lam=float(data["lambda"]),
            residual=float(data["residual"]),
            dimension=int(data["dimension"]),
            dziobek=dz,
            alpha=None if data.get("alpha") is None else float(data["alpha"]),
            notes=list(data.get("notes", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certification report: {exc}") from exc


def load_config(path: PathLike) -> ConfigFile:
    return parse_config(read_json(path))


def load_distances(path: PathLike) -> DistanceVector:
    return parse_distances(read_json(path))


def load_lifted_point(path: PathLike) -> LiftedPoint:
    return LiftedPoint.from_json(read_json(path))


def load_solve_report(path: PathLike) -> SolveReport:
    return SolveReport.from_json(read_json(path))
