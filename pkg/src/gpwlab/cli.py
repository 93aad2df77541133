"""Command-line workflows: build a basis, verify it, rank and convergence studies.

Subcommands read one JSON config, write artifacts into an output
directory, and follow a fixed exit-code contract: 0 on success, 1 when an
acceptance check fails, 2 on config or usage errors.  Identical config
and seed produce byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from . import approx, basis
from .frame import OperatorSplit, verify_split
from .operators import (
    CoefficientJet,
    as_jet,
    make_convected_split,
    make_helmholtz_split,
    omode_kappa_sq,
)
from .polycore import GradedPoly
from .serialize import csv_text, json_text

SCHEMA = "gpw-run/1"
RESIDUAL_TOL = 1e-11
BASIS_FILE = "basis.json"
REPORT_FILE = "report.json"
RANK_FILE = "rank.json"
CONVERGENCE_JSON = "convergence.json"
CONVERGENCE_CSV = "convergence.csv"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    dim: int
    degree: int
    center: tuple[float, ...]
    direction_count: int
    radii: tuple[float, ...]
    seed: int
    operator: dict

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as err:
            raise ConfigError(f"config not found: {path}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if raw.get("schema") != SCHEMA:
            raise ConfigError(f"config schema must be {SCHEMA!r}")
        try:
            dim = int(raw["dimension"])
            degree = int(raw["degree"])
            center = tuple(float(c) for c in raw["center"])
            count = int(raw.get("directions", 1))
            radii = tuple(float(h) for h in raw.get("h_values", ()))
            seed = int(raw.get("seed", 0))
            operator = dict(raw["operator"])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad config field: {err}") from err
        if dim not in (2, 3):
            raise ConfigError("dimension must be 2 or 3")
        if degree < 2:
            raise ConfigError("degree must be at least 2")
        if len(center) != dim:
            raise ConfigError("center length must match the dimension")
        if count < 1:
            raise ConfigError("directions must be at least 1")
        if radii and (
            any(h <= 0 for h in radii) or any(a <= b for a, b in zip(radii, radii[1:]))
        ):
            raise ConfigError("h_values must be positive and strictly decreasing")
        if seed < 0 or seed >= 2**64:
            raise ConfigError("seed must fit in 64 bits")
        return cls(dim, degree, center, count, radii, seed, operator)


def _parse_scalar(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"expected a number or [re, im] pair, got {value!r}")


def _parse_coefficient(value, dim: int, center: Sequence[float]) -> CoefficientJet:
    """A coefficient is a constant scalar or a serialized centered polynomial."""
    if isinstance(value, (int, float)) or (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return CoefficientJet.constant(dim, _parse_scalar(value))
    if isinstance(value, list):
        try:
            poly = GradedPoly.from_records(dim, value)
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad polynomial records: {err}") from err
        return as_jet(poly)
    raise ConfigError(f"cannot read coefficient {value!r}")


@dataclass(frozen=True)
class Problem:
    split: OperatorSplit
    manufactured: approx.ManufacturedProblem | None = None


def build_problem(config: RunConfig) -> Problem:
    op = dict(config.operator)
    kind = op.pop("type", None)
    if kind == "helmholtz":
        preset = op.pop("preset", None)
        if preset == "constant_kappa":
            jet = CoefficientJet.constant(config.dim, _parse_scalar(op.pop("kappa_sq")))
        elif preset == "omode_linear":
            profile = omode_kappa_sq(
                config.dim,
                _parse_scalar(op.pop("kappa0_sq")),
                float(op.pop("x_cut")),
            )
            jet = CoefficientJet.from_polynomial(profile, config.center)
        elif preset == "manufactured":
            phase = _parse_coefficient(op.pop("phase"), config.dim, config.center).poly
            problem = approx.manufactured_helmholtz(phase, config.center)
            return Problem(
                make_helmholtz_split(problem.jet, config.degree), manufactured=problem
            )
        elif preset is None:
            jet = _parse_coefficient(op.pop("kappa_sq_jet"), config.dim, config.center)
        else:
            raise ConfigError(f"unknown helmholtz preset {preset!r}")
        if op:
            raise ConfigError(f"unused operator fields: {sorted(op)}")
        return Problem(make_helmholtz_split(jet, config.degree))
    if kind == "convected":
        try:
            rho = _parse_coefficient(op.pop("rho"), config.dim, config.center)
            mach_raw = op.pop("mach")
            kappa = _parse_scalar(op.pop("kappa"))
        except KeyError as err:
            raise ConfigError(f"missing convected field: {err}") from err
        if not isinstance(mach_raw, list) or len(mach_raw) != config.dim:
            raise ConfigError("mach must list one component per dimension")
        mach = [_parse_coefficient(m, config.dim, config.center) for m in mach_raw]
        if op:
            raise ConfigError(f"unused operator fields: {sorted(op)}")
        try:
            return Problem(make_convected_split(rho, mach, kappa, config.degree))
        except ValueError as err:
            raise ConfigError(str(err)) from err
    raise ConfigError(f"operator type must be helmholtz or convected, got {kind!r}")


def _write(path: Path, text: str, quiet: bool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    if not quiet:
        print(f"wrote {path}")


def cmd_build(config: RunConfig, out: Path, quiet: bool) -> int:
    problem = build_problem(config)
    dirs = basis.directions(config.dim, config.direction_count)
    family = basis.build_family(problem.split, dirs, center=config.center)
    _write(out / BASIS_FILE, json_text(basis.family_to_records(family)), quiet)
    if not quiet:
        worst = max(phi.residual_norm for phi in family)
        print(f"built {len(family)} functions, worst residual {worst:.3e}")
    return 0


def cmd_verify(config: RunConfig, out: Path, quiet: bool) -> int:
    problem = build_problem(config)
    basis_path = out / BASIS_FILE
    try:
        records = json.loads(basis_path.read_text())
        family = basis.family_from_records(records)
    except FileNotFoundError as err:
        raise ConfigError(f"basis file not found: {basis_path}") from err
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
        raise ConfigError(f"unreadable basis file {basis_path}: {err}") from err
    hypotheses = verify_split(problem.split, trials=50, seed=config.seed)
    functions = []
    for index, phi in enumerate(family):
        residual = basis.certificate_norm(problem.split, phi.phase)
        functions.append(
            {
                "index": index,
                "direction": list(phi.direction),
                "residual": residual,
                "passed": residual <= RESIDUAL_TOL,
            }
        )
    passed = hypotheses.passed and all(f["passed"] for f in functions)
    report = {
        "hypotheses": hypotheses.to_dict(),
        "residual_tolerance": RESIDUAL_TOL,
        "functions": functions,
        "passed": passed,
    }
    _write(out / REPORT_FILE, json_text(report), quiet)
    if not quiet:
        failed = [f["index"] for f in functions if not f["passed"]]
        state = "all checks passed" if passed else f"FAILED (functions {failed})"
        print(f"verify: {state}")
    return 0 if passed else 1


def cmd_rank(config: RunConfig, out: Path, quiet: bool) -> int:
    problem = build_problem(config)
    dirs = basis.directions(config.dim, config.direction_count)
    gpw = basis.build_family(problem.split, dirs, center=config.center)
    plane = basis.plane_wave_family(problem.split, dirs, center=config.center)
    report = approx.rank_comparison(gpw, plane)
    _write(out / RANK_FILE, json_text(report.to_dict()), quiet)
    if not quiet:
        print(
            f"rank: plane {report.plane_rank}, generalized {report.gpw_rank} "
            f"({config.direction_count} directions, degree {config.degree})"
        )
    return 0


def cmd_converge(config: RunConfig, out: Path, quiet: bool) -> int:
    problem = build_problem(config)
    if problem.manufactured is None:
        raise ConfigError("converge needs the manufactured operator preset")
    if len(config.radii) < 4:
        raise ConfigError("converge needs at least 4 h_values")
    dirs = basis.directions(config.dim, config.direction_count)
    family = basis.build_family(problem.split, dirs, center=config.center)
    report = approx.convergence_study(
        problem.manufactured.solution,
        family,
        config.radii,
        metadata={
            "operator": problem.split.label,
            "dimension": config.dim,
            "degree": config.degree,
            "directions": config.direction_count,
            "seed": config.seed,
        },
    )
    _write(out / CONVERGENCE_JSON, json_text(report.to_dict()), quiet)
    _write(out / CONVERGENCE_CSV, csv_text(("h", "error", "slope"), report.csv_rows()), quiet)
    if not quiet:
        state = "exact" if report.exact else f"slope {report.slope:.3f}"
        print(f"converge: {state}, threshold {report.threshold:.3f}, passed={report.passed}")
    return 0 if report.passed else 1


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "rank": cmd_rank,
    "converge": cmd_converge,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gpwlab",
        description="Build and study quasi-Trefftz bases of generalized plane waves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("build", "construct a basis and write basis.json"),
        ("verify", "check split hypotheses and the residuals of a basis file"),
        ("rank", "Taylor-truncation ranks of the plane-wave and generalized families"),
        ("converge", "best-approximation convergence study on a manufactured problem"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="run config JSON path")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    try:
        config = RunConfig.load(args.config)
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2**64:
                raise ConfigError("seed must fit in 64 bits")
            config = replace(config, seed=args.seed)
        return COMMANDS[args.command](config, Path(args.out), args.quiet)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
