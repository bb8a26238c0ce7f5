"""Batch command-line front end.

Subcommands: spectrum, threshold, certify-negative, scan, find-tstar,
validate.  Runs are described by a TOML config file, CLI flags, or both
(flags win).  All artifacts are JSON (sorted keys) and CSV with 17
significant digits, so identical configs produce byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence or
bracket failure, 4 certificate contradicted by a direct solve (indicates a
discretization or implementation bug), 5 non-monotone schedule where
monotonicity is required.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import certify, potential, scaling, spectrum, tstar
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    InadmissibleError,
    MeshError,
    NonMonotoneError,
    ToolkitError,
)
from .manifold import DiscreteManifold, build_from_mesh, build_torus_grid, load_off

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_ALARM = 4
EXIT_NONMONOTONE = 5

THREADS_ENV = "GROUNDSTATE_THREADS"
CHECK_FLOOR = -1e-10  # lambda0 below this inside a certified-positive range is an alarm


class AlarmError(ToolkitError):
    """A certificate was contradicted by a direct solve."""


@dataclass
class RunConfig:
    torus: str | None = None
    mesh: str | None = None
    potential: str | None = None
    scaling_family: str = "identity"
    scaling_params: dict[str, Any] = field(default_factory=dict)
    t: float = 0.0
    grid: list[float] | None = None
    tol: float = 1e-8
    solver_tol: float = 1e-10
    k: int = 1
    out: str | None = None
    format: str = "json"
    check: bool = False


# ---------------------------------------------------------------------------
# Config assembly


def _load_config_file(path) -> RunConfig:
    cfg = RunConfig()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    man = data.get("manifold", {})
    cfg.torus = man.get("torus")
    cfg.mesh = man.get("mesh")
    pot = data.get("potential", {})
    cfg.potential = pot.get("expr") or pot.get("file")
    scal = data.get("scaling", {})
    if scal:
        cfg.scaling_family = scal.pop("family", "identity")
        cfg.scaling_params = scal
    run = data.get("run", {})
    for key in ("t", "tol", "solver_tol", "k", "out", "format", "check"):
        if key in run:
            setattr(cfg, key, run[key])
    if "grid" in run:
        cfg.grid = [float(x) for x in run["grid"]]
    return cfg


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.torus is not None:
        cfg.torus, cfg.mesh = args.torus, None
    if args.mesh is not None:
        cfg.mesh, cfg.torus = args.mesh, None
    if args.potential is not None:
        cfg.potential = args.potential
    if args.scaling is not None:
        cfg.scaling_family, cfg.scaling_params = _parse_scaling_flag(args.scaling)
    if getattr(args, "t", None) is not None:
        cfg.t = args.t
    if getattr(args, "grid", None) is not None:
        cfg.grid = _parse_grid(args.grid)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.k is not None:
        cfg.k = args.k
    if args.out is not None:
        cfg.out = args.out
    if args.format is not None:
        cfg.format = args.format
    if getattr(args, "check", False):
        cfg.check = True
    return cfg


def _parse_torus_flag(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--torus expects d:len[,len]:res[,res], got {text!r}")
    try:
        dim = int(parts[0])
        lengths = [float(x) for x in parts[1].split(",")]
        resolution = [int(x) for x in parts[2].split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad torus spec {text!r}: {exc}") from exc
    return dim, lengths, resolution


def _parse_scaling_flag(text: str):
    name, _, rest = text.partition(":")
    if name == "power":
        return name, {"p": float(rest)} if rest else {}
    if name == "table":
        try:
            pts = [[float(x) for x in pair.split(",")] for pair in rest.split(";") if pair]
        except ValueError as exc:
            raise ConfigError(f"bad table points in {text!r}") from exc
        return name, {"points": pts}
    if rest:
        raise ConfigError(f"scaling family {name!r} takes no parameters")
    return name, {}


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc


def _build_manifold(cfg: RunConfig) -> DiscreteManifold:
    if (cfg.torus is None) == (cfg.mesh is None):
        raise ConfigError("exactly one of a torus spec or a mesh path is required")
    if cfg.torus is not None:
        dim, lengths, resolution = _parse_torus_flag(cfg.torus)
        return build_torus_grid(dim, lengths, resolution)
    if not os.path.exists(cfg.mesh):
        raise ConfigError(f"mesh file not found: {cfg.mesh}")
    mesh = load_off(cfg.mesh)
    return build_from_mesh(mesh, descriptor={"source": f"off:{cfg.mesh}"})


def _build_potential(cfg: RunConfig, m: DiscreteManifold) -> potential.Potential:
    if cfg.potential is None:
        raise ConfigError("a potential (expression or sample file) is required")
    if os.path.exists(cfg.potential):
        return potential.make_potential(m, potential.load_samples(cfg.potential))
    return potential.make_potential(m, cfg.potential)


def _build_scaling(cfg: RunConfig) -> scaling.ScalingFunction:
    try:
        return scaling.make_scaling(cfg.scaling_family, **cfg.scaling_params)
    except ValueError as exc:
        raise ConfigError(f"bad scaling: {exc}") from exc


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# Output helpers


def _emit_json(doc: dict, cfg: RunConfig, name: str) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, name)
        with open(path, "w") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text)


def _write_csv(cfg: RunConfig, name: str, header: list[str], rows) -> None:
    if not cfg.out:
        return
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % x for x in row) + "\n")
    print(path)


def _error_record(code: int, message: str) -> None:
    sys.stderr.write(json.dumps({"error": True, "exit_code": code, "message": message}) + "\n")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_spectrum(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    v = _build_potential(cfg, m)
    f = _build_scaling(cfg)
    s = scaling.evaluate(f, cfg.t)
    result = spectrum.lowest_eigenpairs(m, v, s, k=cfg.k, tol=cfg.solver_tol)
    doc = {
        "manifold": m.to_dict(),
        "potential": v.to_dict(),
        "t": cfg.t,
        "spectrum": result.to_dict(),
        "ground_state_sign_ok": spectrum.ground_state_sign_check(result),
    }
    _emit_json(doc, cfg, "spectrum.json")
    if cfg.format == "csv":
        rows = np.column_stack([m.coordinates, result.eigenvectors])
        header = [f"coord{i}" for i in range(m.coordinates.shape[1])] + [
            f"eigvec{i}" for i in range(result.eigenvectors.shape[1])
        ]
        _write_csv(cfg, "eigenvectors.csv", header, rows)
    return EXIT_OK


def cmd_threshold(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    v = _build_potential(cfg, m)
    cert = certify.positivity_threshold(m, v)
    doc = {"certificate": cert.to_dict(), "manifold": m.to_dict(), "potential": v.to_dict()}
    if cfg.check:
        fstar = cert.threshold
        checks = []
        for s in (fstar / 4.0, fstar / 2.0, fstar):
            lam = spectrum.lowest_eigenpairs(m, v, s, tol=cfg.solver_tol).lambda0
            checks.append({"coupling": s, "lambda0": lam})
        doc["checks"] = checks
        _emit_json(doc, cfg, "threshold.json")
        bad = [c for c in checks if c["lambda0"] <= CHECK_FLOOR]
        if bad:
            raise AlarmError(
                f"certified-positive coupling {bad[0]['coupling']!r} solved to "
                f"lambda0 = {bad[0]['lambda0']!r}"
            )
        return EXIT_OK
    _emit_json(doc, cfg, "threshold.json")
    return EXIT_OK


def cmd_certify_negative(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    v = _build_potential(cfg, m)
    f = _build_scaling(cfg)
    cert = certify.negativity_certificate(m, v, f)
    doc = {"certificate": cert.to_dict(), "manifold": m.to_dict(), "potential": v.to_dict()}
    if cfg.check:
        lam = spectrum.lowest_eigenpairs(m, v, cert.witness_coupling, tol=cfg.solver_tol).lambda0
        doc["checks"] = [{"coupling": cert.witness_coupling, "lambda0": lam}]
        _emit_json(doc, cfg, "certificate.json")
        if not lam < 0.0:
            raise AlarmError(
                f"witness coupling {cert.witness_coupling!r} solved to lambda0 = {lam!r} >= 0"
            )
        return EXIT_OK
    _emit_json(doc, cfg, "certificate.json")
    return EXIT_OK


def _sweep_rows(report: tstar.RegimeReport):
    return [s.row() for s in report.samples]


def cmd_scan(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    v = _build_potential(cfg, m)
    f = _build_scaling(cfg)
    if cfg.grid is None:
        raise ConfigError("scan requires a t grid (--grid or run.grid)")
    report = tstar.scan_regimes(m, v, f, cfg.grid, tol=cfg.solver_tol, workers=_workers())
    _emit_json({"scan": report.to_dict(), "manifold": m.to_dict()}, cfg, "scan.json")
    _write_csv(cfg, "sweep.csv", ["t", "s", "lambda0", "residual"], _sweep_rows(report))
    return EXIT_OK


def cmd_find_tstar(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    v = _build_potential(cfg, m)
    f = _build_scaling(cfg)
    if not f.monotone:
        raise NonMonotoneError("find-tstar requires a strictly monotone scaling")
    if cfg.grid is not None:
        grid = cfg.grid
    else:
        t_pos = scaling.invert_monotone(f, certify.positivity_threshold(m, v).threshold)
        t_neg = scaling.invert_monotone(
            f, certify.negativity_certificate(m, v, f).witness_coupling
        )
        grid = tstar.certified_grid((t_pos, t_neg))
    report = tstar.scan_regimes(m, v, f, grid, tol=cfg.solver_tol, workers=_workers())
    result = tstar.find_tstar(m, v, f, tol=cfg.tol, scan=report, solver_tol=cfg.solver_tol)
    doc = {
        "tstar": result.to_dict(),
        "scan": report.to_dict(),
        "manifold": m.to_dict(),
        "potential": v.to_dict(),
    }
    _emit_json(doc, cfg, "tstar.json")
    _write_csv(cfg, "sweep.csv", ["t", "s", "lambda0", "residual"], _sweep_rows(report))
    _write_csv(
        cfg,
        "ground_state.csv",
        [f"coord{i}" for i in range(m.coordinates.shape[1])] + ["ground_state"],
        np.column_stack([m.coordinates, result.ground_state]),
    )
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    m = _build_manifold(cfg)
    doc: dict[str, Any] = {"manifold": m.to_dict()}
    r = spectrum.lowest_eigenpairs(m, None, 0.0, k=1, tol=cfg.solver_tol)
    doc["manifold"]["lowest_laplacian_eigenvalue"] = r.lambda0
    doc["manifold"]["spectrum_nonnegative"] = bool(r.lambda0 >= -1e-10)
    if cfg.potential is not None:
        v = _build_potential(cfg, m)
        doc["potential"] = v.to_dict()
    f = _build_scaling(cfg)
    doc["scaling"] = f.to_dict()
    _emit_json(doc, cfg, "validate.json")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "threshold": cmd_threshold,
    "certify-negative": cmd_certify_negative,
    "scan": cmd_scan,
    "find-tstar": cmd_find_tstar,
    "validate": cmd_validate,
}


def _make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file; flags override its values")
    common.add_argument("--torus", help="torus spec d:len[,len]:res[,res]")
    common.add_argument("--mesh", help="closed triangle mesh in OFF format")
    common.add_argument("--potential", help="sample file or analytic expression")
    common.add_argument("--scaling", help="coupling schedule family[:params]")
    common.add_argument("--tol", type=float, help="target tolerance of the command")
    common.add_argument("--k", type=int, help="number of eigenpairs")
    common.add_argument("--out", help="output directory (default: JSON to stdout)")
    common.add_argument("--format", choices=["json", "csv"], help="extra artifact format")

    parser = argparse.ArgumentParser(
        prog="groundstate",
        description="Spectral toolkit for Schrodinger ground states on compact manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("spectrum", parents=[common], help="lowest eigenpairs at fixed t")
    p.add_argument("--t", type=float, help="schedule parameter t (coupling s = f(t))")
    p = sub.add_parser("threshold", parents=[common], help="positivity certificate")
    p.add_argument("--check", action="store_true", help="solve inside the certified range")
    p = sub.add_parser("certify-negative", parents=[common], help="negativity certificate")
    p.add_argument("--check", action="store_true", help="solve at the witness coupling")
    p = sub.add_parser("scan", parents=[common], help="sign regimes over a t grid")
    p.add_argument("--grid", help="comma-separated ascending t values")
    p = sub.add_parser("find-tstar", parents=[common], help="zero-ground-state parameter")
    p.add_argument("--grid", help="comma-separated ascending t values for bracketing")
    sub.add_parser("validate", parents=[common], help="check inputs and report conditions")
    return parser


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        cfg = _load_config_file(args.config) if args.config else RunConfig()
        cfg = _apply_flags(cfg, args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, InadmissibleError, MeshError, ValueError, OSError) as exc:
        _error_record(EXIT_CONFIG, str(exc))
        return EXIT_CONFIG
    except (ConvergenceError, BracketError) as exc:
        _error_record(EXIT_SOLVER, str(exc))
        return EXIT_SOLVER
    except AlarmError as exc:
        _error_record(EXIT_ALARM, str(exc))
        return EXIT_ALARM
    except NonMonotoneError as exc:
        _error_record(EXIT_NONMONOTONE, str(exc))
        return EXIT_NONMONOTONE
    except ToolkitError as exc:
        _error_record(EXIT_SOLVER, str(exc))
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
