"""Acceptance suite: one measurement per criterion, shared solves cached.

Each ``criterion_*`` function takes an :class:`AcceptanceContext` and returns
a :class:`CriterionResult` holding the measured numbers, the tolerance they
were compared against and a pass flag.  :func:`run_all` runs a selection in
order; ``verify-all`` on the command line is a thin wrapper around it.

Solves that several criteria need (the reference fields, the grid-doubling
levels) are memoised on the context, so running the whole suite costs each
of them once.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import os
import time
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import specfun
from .config import RunConfig
from .farfield import (build_field_bank, far_amplitude, forward_direction, projector_check,
                       planewave_diff_scan, remainder_scan, default_radii, k_quadrature)
from .kernel import SignChoice, boundary_kernel_radial, g_boundary, g_resolvent, poisson_laplace_oracle
from .potential import PotentialKind, PotentialModel, eval_potential, zero_potential
from .quadrature import build_grid
from .solver import WaveVector, apply_green, evaluate_offgrid, plane_wave, solve_ls
from .verify import DegenerateFit, fit_power_law, convolution_phi, ratio_spread, resolvent_bound_check, resolvent_bound_terms

log = logging.getLogger(__name__)

# tolerances pinned from the acceptance list
SPECFUN_REL_TOL = 1e-10
SPECFUN_ABS_TOL = 1e-12
SPECFUN_MAX_SECONDS = 1.0
ASYMPTOTIC_SLOPE = (-1.65, -1.35)
STRUVE_LIMIT_TOL = 0.02
BOUNDARY_LIMIT_TOL = 1e-3
LAPLACE_TOL = 1e-8
SPHERICAL_MAX_SLOPE = -0.85
FREE_FIELD_TOL = 1e-13
BORN_SLOPE = (2.0, 0.2)
RESIDUAL_TOL = 1e-10
DOUBLING_MIN_RATIO = 1.8
ROTATION_TOL = 1e-8
SWEEP_MAX_CHANGE = 0.05
RATE_RATIO_MAX = 3.0
CONVOLUTION_TOL = 0.1
PROJECTOR_FREE_TOL = 0.05
PROJECTOR_COUPLED_TOL = 0.1
PROJECTOR_REFINE_RATIO = 0.7
RUNTIME_SUITE_SECONDS = 30 * 60.0
RUNTIME_REFERENCE_SECONDS = 120.0


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    measured: dict
    tolerance: str
    details: dict = field(default_factory=dict)
    soft: bool = False
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else ("SOFT-FAIL" if self.soft else "FAIL")
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"{tag} [{self.id:2d}] {self.name}: {shown} (tolerance: {self.tolerance})"

    def to_dict(self) -> dict:
        return _jsonable(dataclasses.asdict(self))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


class AcceptanceContext:
    """Configuration plus memoised solves shared between criteria."""

    def __init__(self, config: RunConfig):
        self.config = config
        self._fields = {}
        self.timings = {}

    @property
    def method(self) -> str:
        return self.config.solver["method"]

    @property
    def rule(self) -> str:
        return self.config.solver["rule"]

    def solve(self, grid_spec, model: PotentialModel, k, branch, method=None, rule=None):
        method = method or self.method
        rule = rule or self.rule
        branch = SignChoice.parse(branch)
        key = (grid_spec["L"], grid_spec["N"], model.to_json(), tuple(float(c) for c in k),
               branch.value, method, rule)
        if key not in self._fields:
            grid = build_grid(grid_spec["L"], grid_spec["N"])
            t0 = time.perf_counter()
            self._fields[key] = solve_ls(grid, model, WaveVector(k), branch, method=method, rule=rule)
            log.info("solve L=%g N=%d %s k=%s %s: %.1fs", grid_spec["L"], grid_spec["N"],
                     branch.value, tuple(k), method, time.perf_counter() - t0)
        return self._fields[key]

    def reference_field(self, branch=None, k=None):
        """Solve at the configured grid (timed on first use for the configured branch)."""
        branch = self.config.branch if branch is None else SignChoice.parse(branch)
        k = self.config.k if k is None else k
        first = "reference_solve" not in self.timings and branch is self.config.branch \
            and tuple(k) == tuple(self.config.k)
        t0 = time.perf_counter()
        fld = self.solve(self.config.grid, self.config.potential, k, branch)
        if first:
            self.timings["reference_solve"] = time.perf_counter() - t0
        return fld


# ---------------------------------------------------------------------------
# 1-5: special functions and kernel


def load_specfun_oracle():
    """The frozen 1000-point oracle table as a dict of arrays."""
    text = resources.files("relscatter").joinpath("data/specfun_oracle.csv").read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    return {key: np.array([float(r[key]) for r in rows]) for key in ("rho", "j0", "n0", "h0")}


def criterion_specfun(ctx) -> CriterionResult:
    table = load_specfun_oracle()
    rho = table["rho"]
    t0 = time.perf_counter()
    j0, n0, h0 = specfun.bessel_triplet(rho)
    elapsed = time.perf_counter() - t0
    worst = {}
    ok = True
    for name, got in (("j0", j0), ("n0", n0), ("h0", h0)):
        ref = table[name]
        abs_err = np.abs(got - ref)
        rel_err = abs_err / np.maximum(np.abs(ref), 1e-300)
        good = (rel_err <= SPECFUN_REL_TOL) | (abs_err <= SPECFUN_ABS_TOL)
        ok &= bool(np.all(good))
        away = np.abs(ref) > 1e-3
        worst[name] = {"max_rel_away_from_zeros": float(np.max(rel_err[away])),
                       "max_abs_near_zeros": float(np.max(abs_err[~away])) if np.any(~away) else 0.0,
                       "failures": int(np.sum(~good))}
    passed = ok and elapsed <= SPECFUN_MAX_SECONDS
    return CriterionResult(
        1, "special-function accuracy", passed,
        {"max_rel_error": max(w["max_rel_away_from_zeros"] for w in worst.values()),
         "max_abs_near_zeros": max(w["max_abs_near_zeros"] for w in worst.values()), "seconds": elapsed},
        f"rel <= {SPECFUN_REL_TOL:g} (abs <= {SPECFUN_ABS_TOL:g} near zeros), runtime <= 1 s",
        {"per_function": worst, "points": len(rho)},
    )


def _leading_residuals(rho):
    j0, n0, _ = specfun.bessel_triplet(rho)
    amp = np.sqrt(2.0 / (math.pi * rho))
    return np.abs(j0 - amp * np.cos(rho - 0.25 * math.pi)), np.abs(n0 - amp * np.sin(rho - 0.25 * math.pi))


def criterion_asymptotic_rates(ctx) -> CriterionResult:
    # The residuals oscillate with the phase of the next asymptotic term.
    # Sampling at the crests of that term (where the leading cos or sin
    # vanishes) measures the envelope rather than the phase.
    n = np.arange(7, 102)
    crest_j = 0.75 * math.pi + n * math.pi
    crest_n = 0.25 * math.pi + n * math.pi
    crest_j = crest_j[(crest_j >= 20) & (crest_j <= 320)]
    crest_n = crest_n[(crest_n >= 20) & (crest_n <= 320)]
    rj = _leading_residuals(crest_j)[0]
    rn = _leading_residuals(crest_n)[1]
    fit_j = fit_power_law(np.column_stack([crest_j, rj]))
    fit_n = fit_power_law(np.column_stack([crest_n, rn]))
    spec_pts = np.array([20.0, 40.0, 80.0, 160.0, 320.0])
    sj, sn = _leading_residuals(spec_pts)
    _, n0, h0 = specfun.bessel_triplet(np.array([320.0]))
    limit = float((h0[0] - n0[0]) * 320.0 / (2.0 / math.pi))
    lo, hi = ASYMPTOTIC_SLOPE
    passed = lo <= fit_j.exponent <= hi and lo <= fit_n.exponent <= hi \
        and abs(limit - 1.0) <= STRUVE_LIMIT_TOL
    return CriterionResult(
        2, "Bessel/Neumann/Struve asymptotic rates", passed,
        {"slope_j0": fit_j.exponent, "slope_n0": fit_n.exponent, "struve_ratio_320": limit},
        f"slopes in [{lo}, {hi}] on [20, 320]; (H0-N0)*rho/(2/pi) within 2% of 1 at 320",
        {"fit_j0": fit_j.to_dict(), "fit_n0": fit_n.to_dict(), "sampling": "crest phases",
         "slope_j0_at_doubling_points": float(np.polyfit(np.log(spec_pts), np.log(sj), 1)[0]),
         "slope_n0_at_doubling_points": float(np.polyfit(np.log(spec_pts), np.log(sn), 1)[0])},
    )


def criterion_boundary_limit(ctx) -> CriterionResult:
    mus = [1e-2, 1e-3, 1e-4]
    errs = {}
    passed = True
    for sign in (SignChoice.PLUS, SignChoice.MINUS):
        target = g_boundary(1.0, (1.0, 0.0), sign).value
        e = [abs(g_resolvent(complex(1.0, sign.pm * mu), (1.0, 0.0)).value - target) for mu in mus]
        errs[sign.value] = e
        passed &= all(b < a for a, b in zip(e, e[1:])) and e[-1] <= BOUNDARY_LIMIT_TOL
    return CriterionResult(
        3, "resolvent boundary-value limit", passed,
        {"plus_at_1e-4": errs["plus"][-1], "minus_at_1e-4": errs["minus"][-1]},
        f"monotone decrease over mu in {mus}, <= {BOUNDARY_LIMIT_TOL:g} at 1e-4",
        {"errors": errs, "mu": mus},
    )


def criterion_laplace_oracle(ctx) -> CriterionResult:
    zs = [-0.5, -1.0, complex(-2.0, 1.0)]
    rs = [0.5, 1.0, 2.0]
    rows = []
    for z in zs:
        for r in rs:
            a = g_resolvent(z, (r, 0.0)).value
            b = poisson_laplace_oracle(z, r)
            rows.append({"z": str(z), "r": r, "error": abs(a - b)})
    worst = max(row["error"] for row in rows)
    return CriterionResult(
        4, "Laplace-transform oracle", worst <= LAPLACE_TOL,
        {"max_abs_error": worst}, f"<= {LAPLACE_TOL:g} absolute on the 3x3 (z, r) grid",
        {"points": rows},
    )


def criterion_spherical_term(ctx) -> CriterionResult:
    r = np.geomspace(10.0, 500.0, 40)
    slopes = {}
    for sign in (SignChoice.PLUS, SignChoice.MINUS):
        g = boundary_kernel_radial(1.0, r, sign)
        lead = math.sqrt(1.0 / math.pi) * (1 + 1j * sign.pm) * np.exp(1j * sign.pm * r) / np.sqrt(r)
        slopes[sign.value] = fit_power_law(np.column_stack([r, np.abs(g - lead)])).exponent
    worst = max(slopes.values())
    return CriterionResult(
        5, "kernel spherical-wave remainder", worst <= SPHERICAL_MAX_SLOPE,
        {"slope_plus": slopes["plus"], "slope_minus": slopes["minus"]},
        f"slope <= {SPHERICAL_MAX_SLOPE} over |x| in [10, 500]",
    )


# ---------------------------------------------------------------------------
# 6-10: solver


def criterion_free_field(ctx) -> CriterionResult:
    cfg = ctx.config
    errs, amps = [], []
    for branch in (SignChoice.PLUS, SignChoice.MINUS):
        fld = ctx.solve(cfg.grid, zero_potential(), cfg.k, branch)
        errs.append(float(np.max(np.abs(fld.values - plane_wave(fld.grid.nodes, fld.k)))))
        thetas = np.linspace(0, 2 * math.pi, 16, endpoint=False)
        amps.append(float(np.max(np.abs(far_amplitude(fld, np.column_stack([np.cos(thetas), np.sin(thetas)]))))))
    passed = max(errs) <= FREE_FIELD_TOL and max(amps) == 0.0
    return CriterionResult(
        6, "free-field exactness", passed, {"sup_error": max(errs), "max_amplitude": max(amps)},
        f"sup |phi - phi0| <= {FREE_FIELD_TOL:g}; far amplitude identically 0",
    )


def criterion_born(ctx) -> CriterionResult:
    cfg = ctx.config
    spec = cfg.verification["sweep_grid"]
    grid = build_grid(spec["L"], spec["N"])
    k = WaveVector(cfg.k)
    unit = cfg.potential.scaled(1.0 / cfg.potential.coupling) if cfg.potential.coupling else \
        dataclasses.replace(cfg.potential, coupling=1.0)
    phi0 = plane_wave(grid.nodes, k)
    born = apply_green(grid, k, cfg.branch, eval_potential(unit, grid.nodes) * phi0, rule=ctx.rule)
    eps = [1e-3, 3e-3, 1e-2]
    errs = []
    for e in eps:
        fld = solve_ls(grid, unit.scaled(e), k, cfg.branch, method="dense", rule=ctx.rule)
        errs.append(float(np.max(np.abs(fld.values - phi0 + e * born))))
    slope = float(np.polyfit(np.log(eps), np.log(errs), 1)[0])
    target, tol = BORN_SLOPE
    return CriterionResult(
        7, "Born scaling", abs(slope - target) <= tol, {"slope": slope},
        f"{target} +- {tol}", {"epsilon": eps, "errors": errs, "grid": spec},
    )


def _vertex_lattice(grid):
    ax = -grid.L + np.arange(1, grid.N) * grid.h
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def _doubling(ctx, rule):
    cfg = ctx.config
    L = cfg.grid["L"]
    fields = [ctx.solve({"L": L, "N": n}, cfg.potential, cfg.k, cfg.branch, rule=rule)
              for n in cfg.verification["doubling_levels"]]
    verts = _vertex_lattice(fields[0].grid)
    at_vertices = [evaluate_offgrid(f, verts) for f in fields]
    coarse_nodes = fields[0].grid.nodes
    at_nodes = [fields[0].values] + [evaluate_offgrid(f, coarse_nodes) for f in fields[1:]]

    def ratio(vals):
        d1 = float(np.max(np.abs(vals[0] - vals[1])))
        d2 = float(np.max(np.abs(vals[1] - vals[2])))
        return d1, d2, d1 / d2

    return ratio(at_vertices), ratio(at_nodes)


def criterion_residual_doubling(ctx) -> CriterionResult:
    residuals = {b.value: ctx.reference_field(b).residual_norm for b in (SignChoice.PLUS, SignChoice.MINUS)}
    (v1, v2, vr), (n1, n2, nr) = _doubling(ctx, ctx.rule)
    other = "cell_average" if ctx.rule == "diagonal" else "diagonal"
    (o1, o2, orat), (_, _, onr) = _doubling(ctx, other)
    passed = max(residuals.values()) <= RESIDUAL_TOL and vr >= DOUBLING_MIN_RATIO
    return CriterionResult(
        8, "discrete residual and grid doubling", passed,
        {"max_residual": max(residuals.values()), "contraction": vr},
        f"residual <= {RESIDUAL_TOL:g}; contraction >= {DOUBLING_MIN_RATIO} at common points",
        {"residuals": residuals, "levels": ctx.config.verification["doubling_levels"],
         "common_points": "interior vertex lattice of the coarsest grid",
         "vertex_changes": [v1, v2], "coarse_node_changes": [n1, n2], "coarse_node_ratio": nr,
         f"{other}_vertex_ratio": orat, f"{other}_coarse_node_ratio": onr, "rule": ctx.rule},
    )


def criterion_rotation(ctx) -> CriterionResult:
    cfg = ctx.config
    model = cfg.potential if cfg.potential.is_radial else dataclasses.replace(cfg.potential, center=(0.0, 0.0))
    kx, ky = cfg.k
    base = ctx.solve(cfg.grid, model, (kx, ky), cfg.branch)
    rot = ctx.solve(cfg.grid, model, (-ky, kx), cfg.branch)
    n = base.grid.N
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    # a quarter turn maps node (i, j) to node (N-1-j, i)
    mapped = rot.values[((n - 1 - j) * n + i).ravel()]
    mismatch = float(np.max(np.abs(mapped - base.values[(i * n + j).ravel()])))
    return CriterionResult(
        9, "rotational symmetry", mismatch <= ROTATION_TOL, {"mismatch": mismatch},
        f"<= {ROTATION_TOL:g}", {"radial_model_used": model.to_dict()},
    )


def _sweep_sup(ctx, spec, ring_points):
    cfg = ctx.config
    a, b = cfg.verification["sweep_annulus"]
    nm, na = cfg.verification["sweep_shape"]
    _, _, kpts, _ = k_quadrature(a, b, nm, na)
    grid = build_grid(spec["L"], spec["N"])
    base = build_grid(cfg.verification["sweep_grid"]["L"], cfg.verification["sweep_grid"]["N"])
    # nodes of the base grid inside the (possibly enlarged) grid
    offset = (grid.N - base.N) // 2
    ii, jj = np.meshgrid(np.arange(base.N) + offset, np.arange(base.N) + offset, indexing="ij")
    inner = (ii * grid.N + jj).ravel()
    sups = []
    for k in kpts:
        fld = solve_ls(grid, cfg.potential, WaveVector(k), cfg.branch, method="fft", rule=ctx.rule)
        s = max(float(np.max(np.abs(fld.values[inner]))),
                float(np.max(np.abs(evaluate_offgrid(fld, ring_points)))))
        sups.append(s)
    return float(max(sups)), len(kpts)


def criterion_boundedness(ctx) -> CriterionResult:
    spec = ctx.config.verification["sweep_grid"]
    base = build_grid(spec["L"], spec["N"])
    big = base.with_half_width(1.5 * spec["L"])
    radii = spec["L"] * np.array([1.5, 2.0, 5.0, 10.0, 20.0, 50.0])
    th = 2 * math.pi * np.arange(8) / 8
    ring = (radii[:, None, None] * np.stack([np.cos(th), np.sin(th)], -1)[None]).reshape(-1, 2)
    s1, nk = _sweep_sup(ctx, spec, ring)
    s2, _ = _sweep_sup(ctx, {"L": big.L, "N": big.N}, ring)
    change = abs(s2 - s1) / s1
    passed = math.isfinite(s1) and math.isfinite(s2) and change < SWEEP_MAX_CHANGE
    return CriterionResult(
        10, "uniform boundedness over the k-annulus", passed,
        {"sup": s1, "sup_enlarged": s2, "relative_change": change},
        f"finite sup over |x| <= 50L, change < {SWEEP_MAX_CHANGE:.0%} when L -> 1.5L",
        {"k_points": nk, "grids": [spec, {"L": big.L, "N": big.N}], "ring_radii": radii},
    )


# ---------------------------------------------------------------------------
# 11-12: far-field rates


def _rate_scan(ctx, sigma, mode):
    cfg = ctx.config
    model = PotentialModel(PotentialKind.POWER, sigma, cfg.potential.coupling or 0.3)
    # the outgoing field phi^- carries e^{i lam r}; scans run along omega_k
    fld = ctx.solve(cfg.verification["rate_grid"], model, cfg.k, SignChoice.MINUS, method="fft")
    radii = default_radii(cfg.fit["rmin"], cfg.fit["rmax"], cfg.fit["points"])
    scan = planewave_diff_scan if mode == "diff" else remainder_scan
    return scan(fld, forward_direction(fld), radii)


def criterion_diff_rates(ctx) -> CriterionResult:
    out = {}
    ok = True
    for sigma, target in ((1.75, -0.25), (3.0, -0.5)):
        fit = fit_power_law(_rate_scan(ctx, sigma, "diff"))
        out[f"slope_sigma_{sigma:g}"] = fit.exponent
        ok &= abs(fit.exponent - target) <= 0.15
    pts = _rate_scan(ctx, 2.0, "diff")
    ratio = ratio_spread(pts[:, 1] * np.sqrt(pts[:, 0]) / np.log1p(pts[:, 0]))
    out["log_ratio_sigma_2"] = ratio
    ok &= ratio <= RATE_RATIO_MAX
    return CriterionResult(
        11, "plane-wave difference rates", ok, out,
        "sigma 1.75: -0.25 +- 0.15; sigma 3: -0.5 +- 0.15; sigma 2: max/min of diff / (r^-1/2 log(1+r)) <= 3",
        {"grid": ctx.config.verification["rate_grid"], "branch": "minus", "direction": "forward"},
    )


def criterion_remainder_rates(ctx) -> CriterionResult:
    out = {}
    ok = True
    for sigma, target in ((2.5, -0.75), (3.5, -1.0)):
        fit = fit_power_law(_rate_scan(ctx, sigma, "remainder"))
        out[f"slope_sigma_{sigma:g}"] = fit.exponent
        ok &= abs(fit.exponent - target) <= 0.2
    return CriterionResult(
        12, "plane-plus-spherical-wave remainder rates", ok, out,
        "sigma 2.5: -0.75 +- 0.2; sigma 3.5: -1.0 +- 0.2",
        {"grid": ctx.config.verification["rate_grid"], "branch": "minus", "direction": "forward"},
    )


# ---------------------------------------------------------------------------
# 13-16


def _phi_curve(beta, gamma, radii):
    return np.array([convolution_phi(beta, gamma, (r, 0.0)) for r in radii])


def criterion_convolution_decay(ctx) -> CriterionResult:
    radii = np.geomspace(10.0, 200.0, 12)
    measured, cases = {}, {}
    ok = True
    for beta in (1.0, 0.5):
        for gamma in (1.75, 2.0, 3.0):
            phi = _phi_curve(beta, gamma, radii)
            key = f"beta_{beta:g}_gamma_{gamma:g}"
            if gamma == 2.0:
                jb = np.sqrt(1 + radii**2)
                value = ratio_spread(phi * jb**beta / np.log1p(jb))
                good = value <= RATE_RATIO_MAX
                cases[key] = {"ratio": value, "bound": RATE_RATIO_MAX}
            else:
                target = -(beta + gamma - 2.0) if gamma < 2 else -beta
                with warnings.catch_warnings():
                    # the shallow beta = 1/2 cases span less than a decade
                    warnings.simplefilter("ignore", DegenerateFit)
                    fit = fit_power_law(np.column_stack([radii, phi]))
                value = fit.exponent
                good = abs(value - target) <= CONVOLUTION_TOL
                cases[key] = {"slope": value, "target": target, "fit": fit.to_dict()}
            measured[key] = value
            cases[key]["passed"] = bool(good)
            ok &= good
    details = {"cases": cases, "window": [10.0, 200.0]}
    # the same fits farther out show how much of any gap is preasymptotic
    far = np.geomspace(1e3, 1e5, 12)
    for key, case in cases.items():
        if "slope" in case:
            beta, gamma = (float(s) for s in key.split("_")[1::2])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateFit)
                case["slope_on_1e3_1e5"] = fit_power_law(
                    np.column_stack([far, _phi_curve(beta, gamma, far)])).exponent
    return CriterionResult(
        13, "convolution decay cases", ok, measured,
        "gamma < 2: -(beta+gamma-2) +- 0.1; gamma > 2: -beta +- 0.1; gamma = 2: ratio <= 3",
        details,
    )


def criterion_resolvent_bound(ctx) -> CriterionResult:
    fld = ctx.reference_field()
    violation = resolvent_bound_check(fld)
    cmin = resolvent_bound_terms(fld).minimal_constant()
    return CriterionResult(
        14, "pointwise resolvent bound", violation == 0.0,
        {"min_violation": violation, "minimal_constant": cmin},
        "violation 0 for some C <= 100",
    )


def criterion_projector(ctx) -> CriterionResult:
    cfg = ctx.config
    ver = cfg.verification
    grid = build_grid(ver["bank_grid"]["L"], ver["bank_grid"]["N"])
    a, b = ver["bank_annulus"]
    nm, na = ver["bank_shape"]
    u = np.exp(-0.5 * np.sum(grid.nodes**2, axis=1))
    coupled = cfg.potential.scaled(0.1 / cfg.potential.coupling) if cfg.potential.coupling else \
        dataclasses.replace(cfg.potential, coupling=0.1)

    def defect(model, n_mod):
        bank = build_field_bank(grid, model, cfg.branch, a, b, n_mod, na, method="fft")
        return projector_check(bank, u, a, b)

    d_free = defect(zero_potential(), nm)
    d_free_fine = defect(zero_potential(), 2 * nm)
    d_coupled = defect(coupled, nm)
    ratio = d_free_fine / d_free if d_free > 0 else 0.0
    passed = d_free <= PROJECTOR_FREE_TOL and d_coupled <= PROJECTOR_COUPLED_TOL \
        and ratio <= PROJECTOR_REFINE_RATIO
    return CriterionResult(
        15, "band projector idempotence (diagnostic)", passed,
        {"defect_free": d_free, "defect_coupling_0.1": d_coupled, "refinement_ratio": ratio},
        f"free <= {PROJECTOR_FREE_TOL}, coupling 0.1 <= {PROJECTOR_COUPLED_TOL}, "
        f"ratio <= {PROJECTOR_REFINE_RATIO} for {nm} -> {2 * nm} moduli",
        {"defect_free_refined": d_free_fine, "bank_grid": ver["bank_grid"], "bank_shape": [nm, na]},
        soft=True,
    )


def criterion_runtime(ctx, elapsed: float, partial: bool) -> CriterionResult:
    ref = ctx.timings.get("reference_solve")
    if ref is None:
        t0 = time.perf_counter()
        ctx.reference_field()
        ref = ctx.timings.get("reference_solve", time.perf_counter() - t0)
    passed = elapsed <= RUNTIME_SUITE_SECONDS and ref <= RUNTIME_REFERENCE_SECONDS
    return CriterionResult(
        16, "runtime envelope", passed, {"suite_seconds": elapsed, "reference_solve_seconds": ref},
        "suite <= 1800 s, reference dense solve <= 120 s",
        {"cpu_count": os.cpu_count(), "partial_suite": partial,
         "reference_grid": ctx.config.grid},
    )


CRITERIA = {
    1: criterion_specfun,
    2: criterion_asymptotic_rates,
    3: criterion_boundary_limit,
    4: criterion_laplace_oracle,
    5: criterion_spherical_term,
    6: criterion_free_field,
    7: criterion_born,
    8: criterion_residual_doubling,
    9: criterion_rotation,
    10: criterion_boundedness,
    11: criterion_diff_rates,
    12: criterion_remainder_rates,
    13: criterion_convolution_decay,
    14: criterion_resolvent_bound,
    15: criterion_projector,
}


def run_all(config: RunConfig | None = None, only=None, context=None, progress=None):
    """Run the selected criteria (all 16 by default) and return their results.

    ``progress``, if given, is called with each :class:`CriterionResult` as
    soon as it is available.
    """
    ctx = context or AcceptanceContext(config or RunConfig())
    ids = sorted(set(only)) if only else list(range(1, 17))
    unknown = [i for i in ids if i not in CRITERIA and i != 16]
    if unknown:
        raise ValueError(f"unknown criteria: {unknown}")
    results = []
    start = time.perf_counter()
    for cid in ids:
        if cid == 16:
            continue
        t0 = time.perf_counter()
        res = CRITERIA[cid](ctx)
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if progress:
            progress(res)
    if 16 in ids:
        res = criterion_runtime(ctx, time.perf_counter() - start, partial=len(ids) < 16)
        results.append(res)
        if progress:
            progress(res)
    return results


def summary(results) -> dict:
    hard = [r for r in results if not r.soft]
    return {
        "criteria": [r.to_dict() for r in results],
        "hard_passed": sum(r.passed for r in hard),
        "hard_total": len(hard),
        "soft_passed": sum(r.passed for r in results if r.soft),
        "all_hard_pass": all(r.passed for r in hard),
    }
