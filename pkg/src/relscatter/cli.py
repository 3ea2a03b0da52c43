"""Command-line entry point: ``relscatter <subcommand> ...``.

Every subcommand writes its result file with the provenance block produced
by :func:`provenance` (a SHA-256 of the canonical parameters plus package
versions).  CSV files carry it as ``#`` comment lines ahead of the header,
JSON files under the ``"provenance"`` key.  No timestamps are recorded, so
rerunning a command with the same inputs rewrites identical bytes.

Exit status: 0 on success, 1 for invalid input, 2 for a numerical failure
and 3 when ``verify-all`` finds a failing acceptance criterion.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, specfun
from .config import RunConfig
from .errors import NumericalError, ValidationError
from .farfield import default_radii, far_amplitude_table, planewave_diff_scan, remainder_scan
from .kernel import SignChoice, g_boundary
from .potential import PotentialModel
from .quadrature import build_grid
from .solver import ScatteringField, WaveVector, solve_ls

log = logging.getLogger("relscatter")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


def provenance(parameters: dict) -> dict:
    canon = json.dumps(parameters, sort_keys=True, separators=(",", ":"))
    return {
        "parameters_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "parameters": parameters,
        "versions": {
            "relscatter": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }


def _write_json(path, payload):
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows, prov):
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8", newline="") as fh:
        fh.write("# provenance: " + json.dumps(prov, sort_keys=True) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_csv(path):
    """Rows of a CSV written by this tool as a list of dicts (provenance lines skipped)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ---------------------------------------------------------------------------
# field files


def field_to_dict(field: ScatteringField, config: RunConfig | None = None) -> dict:
    params = config.to_dict() if config is not None else {
        "grid": {"L": field.grid.L, "N": field.grid.N},
        "potential": field.model.to_dict() if field.model else None,
        "k": list(field.k.k), "branch": field.branch.value,
        "solver": {"method": field.method, "rule": field.rule},
    }
    return {
        "grid": {"L": field.grid.L, "N": field.grid.N, "h": field.grid.h},
        "k": list(field.k.k),
        "branch": field.branch.value,
        "potential": field.model.to_dict() if field.model else None,
        "method": field.method,
        "rule": field.rule,
        "residual_norm": field.residual_norm,
        "condition_estimate": field.condition_estimate,
        "iterations": field.iterations,
        "nodes": field.grid.nodes.tolist(),
        "values": {"re": field.values.real.tolist(), "im": field.values.imag.tolist()},
        "psi": {"re": field.psi.real.tolist(), "im": field.psi.imag.tolist()},
        "fit": config.fit if config is not None else None,
        "provenance": provenance(params),
    }


def field_from_dict(d: dict) -> ScatteringField:
    try:
        grid = build_grid(float(d["grid"]["L"]), int(d["grid"]["N"]))
        values = np.asarray(d["values"]["re"]) + 1j * np.asarray(d["values"]["im"])
        psi = np.asarray(d["psi"]["re"]) + 1j * np.asarray(d["psi"]["im"])
        model = PotentialModel.from_dict(d["potential"]) if d.get("potential") else None
        fld = ScatteringField(
            grid=grid, k=WaveVector(d["k"]), branch=SignChoice.parse(d["branch"]),
            values=values, psi=psi, residual_norm=float(d["residual_norm"]), model=model,
            method=d.get("method", "dense"), rule=d.get("rule", "diagonal"),
            condition_estimate=d.get("condition_estimate"), iterations=d.get("iterations"),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"field file is missing or has malformed entry {exc}") from None
    if values.shape != (grid.size,) or psi.shape != (grid.size,):
        raise ValidationError("field file arrays do not match the grid size")
    return fld


def load_field(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return field_from_dict(d), d


# ---------------------------------------------------------------------------
# subcommands


def _sample_points(lo, hi, n, spacing):
    if n < 1:
        raise ValidationError("--points must be at least 1")
    if not lo <= hi:
        raise ValidationError("range needs min <= max")
    if spacing == "log":
        if lo <= 0:
            raise ValidationError("log spacing needs a positive minimum")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def cmd_specfun_table(args) -> int:
    rho = _sample_points(args.min, args.max, args.points, args.spacing)
    fn = {"j0": specfun.bessel_j0, "n0": specfun.neumann_n0, "h0": specfun.struve_h0}[args.fn]
    values = np.real(fn(rho))
    regimes = np.broadcast_to(specfun.regime_of(rho), rho.shape)
    params = {"command": "specfun-table", "fn": args.fn, "min": args.min, "max": args.max,
              "points": args.points, "spacing": args.spacing}
    _write_csv(args.out, ["rho", "value", "regime"], zip(rho, values, regimes), provenance(params))
    return EXIT_OK


def cmd_kernel_table(args) -> int:
    r = _sample_points(args.rmin, args.rmax, args.points, args.spacing)
    rows = []
    for ri in r:
        ev = g_boundary(args.lam, (ri, 0.0), args.sign)
        rows.append((ri, ev.value.real, ev.value.imag, ev.singular_part, ev.regime.value))
    params = {"command": "kernel-table", "lambda": args.lam, "sign": SignChoice.parse(args.sign).value,
              "rmin": args.rmin, "rmax": args.rmax, "points": args.points, "spacing": args.spacing}
    _write_csv(args.out, ["r", "re", "im", "singular", "regime"], rows, provenance(params))
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    fld = solve_ls(cfg.build_grid(), cfg.potential, cfg.wave_vector(), cfg.branch,
                   method=cfg.solver["method"], rule=cfg.solver["rule"])
    log.info("residual %.3g", fld.residual_norm)
    _write_json(args.out, field_to_dict(fld, cfg))
    return EXIT_OK


def cmd_farfield(args) -> int:
    fld, raw = load_field(args.field)
    if args.directions < 1:
        raise ValidationError("--directions must be at least 1")
    amp = far_amplitude_table(fld, args.directions)
    params = {"command": "farfield", "directions": args.directions,
              "field_sha256": raw["provenance"]["parameters_sha256"]}
    rows = zip(amp.thetas, amp.values.real, amp.values.imag)
    _write_csv(args.out, ["theta", "re", "im"], rows, provenance(params))
    return EXIT_OK


def cmd_scan(args) -> int:
    fld, raw = load_field(args.field)
    fit = raw.get("fit") or {"rmin": 20.0, "rmax": 200.0, "points": 24}
    rmin = fit["rmin"] if args.rmin is None else args.rmin
    rmax = fit["rmax"] if args.rmax is None else args.rmax
    points = fit["points"] if args.points is None else args.points
    if not 1.0 <= rmin < rmax or points < 2:
        raise ValidationError("scan radii need 1 <= rmin < rmax and at least 2 points")
    omega = np.array([math.cos(args.direction), math.sin(args.direction)])
    radii = default_radii(rmin, rmax, points)
    scan = planewave_diff_scan if args.mode == "diff" else remainder_scan
    rows = scan(fld, omega, radii)
    params = {"command": "scan", "mode": args.mode, "direction": args.direction,
              "rmin": rmin, "rmax": rmax, "points": points,
              "field_sha256": raw["provenance"]["parameters_sha256"]}
    _write_csv(args.out, ["r", "value"], rows.tolist(), provenance(params))
    return EXIT_OK


def _parse_only(text):
    if text is None:
        return None
    try:
        ids = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise ValidationError("--only takes a comma-separated list of criterion numbers") from None
    if not ids or any(not 1 <= i <= 16 for i in ids):
        raise ValidationError("criterion numbers run from 1 to 16")
    return ids


def cmd_verify_all(args) -> int:
    from .acceptance import run_all, summary

    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    only = _parse_only(args.only)

    def show(res):
        print(res.line(), flush=True)

    results = run_all(cfg, only=only, progress=show)
    report = summary(results)
    report["provenance"] = provenance(cfg.to_dict())
    report["selection"] = only or list(range(1, 17))
    if args.report:
        _write_json(args.report, report)
    print(f"{report['hard_passed']}/{report['hard_total']} hard criteria passed")
    return EXIT_OK if report["all_hard_pass"] else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relscatter",
        description="Generalized eigenfunctions of the 2D relativistic Schrodinger operator "
                    "via the Lippmann-Schwinger equation.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("specfun-table", help="tabulate J0, N0 or H0")
    s.add_argument("--fn", choices=["j0", "n0", "h0"], required=True)
    s.add_argument("--min", type=float, required=True)
    s.add_argument("--max", type=float, required=True)
    s.add_argument("--points", type=int, default=100)
    s.add_argument("--spacing", choices=["log", "linear"], default="log")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_specfun_table)

    s = sub.add_parser("kernel-table", help="tabulate the boundary kernel g^+- against r")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--sign", choices=["plus", "minus"], required=True)
    s.add_argument("--rmin", type=float, required=True)
    s.add_argument("--rmax", type=float, required=True)
    s.add_argument("--points", type=int, default=100)
    s.add_argument("--spacing", choices=["log", "linear"], default="log")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_kernel_table)

    s = sub.add_parser("solve", help="solve the Lippmann-Schwinger equation for one run file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("farfield", help="far-field amplitude of a solved field")
    s.add_argument("--field", required=True)
    s.add_argument("--directions", type=int, default=64)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_farfield)

    s = sub.add_parser("scan", help="radial scan of |phi - phi0| or the two-term remainder")
    s.add_argument("--field", required=True)
    s.add_argument("--mode", choices=["diff", "remainder"], required=True)
    s.add_argument("--direction", type=float, required=True, help="angle of omega_x in radians")
    s.add_argument("--rmin", type=float, default=None)
    s.add_argument("--rmax", type=float, default=None)
    s.add_argument("--points", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("verify-all", help="run the acceptance suite")
    s.add_argument("--config", default=None, help="run file (default: reference configuration)")
    s.add_argument("--report", default=None)
    s.add_argument("--only", default=None, help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
