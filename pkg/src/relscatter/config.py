"""Run configuration: loading, validation and canonical serialization.

A run file looks like::

    {
      "grid": {"L": 12.0, "N": 96},
      "potential": {"kind": "power", "sigma": 2.5, "coupling": 0.3,
                    "center": [0, 0], "width": 1.0},
      "k": [1.0, 0.0],
      "branch": "plus",
      "solver": {"method": "auto", "rule": "diagonal"},
      "fit": {"rmin": 20.0, "rmax": 200.0, "points": 24},
      "verification": {...},
      "outputs": {}
    }

Every section except ``potential`` and ``k`` may be omitted.  The
``verification`` section holds the auxiliary grids used by ``verify-all``
(see :data:`DEFAULT_VERIFICATION`).
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .kernel import SignChoice
from .potential import PotentialModel
from .quadrature import QuadratureGrid, build_grid
from .solver import RULES, WaveVector

DEFAULT_VERIFICATION = {
    # large untruncated domain for far-field rate scans (FFT solver)
    "rate_grid": {"L": 256.0, "N": 1024},
    # boundedness sweep over the k-annulus and its 1.5x enlarged domain
    "sweep_grid": {"L": 12.0, "N": 48},
    "sweep_annulus": [0.5, 2.0],
    "sweep_shape": [8, 16],
    # grid-doubling study, coarsest level first
    "doubling_levels": [24, 48, 96],
    # field bank for the generalized transform
    "bank_grid": {"L": 8.0, "N": 32},
    "bank_annulus": [0.5, 2.0],
    "bank_shape": [16, 32],
}

_TOP_KEYS = {"grid", "potential", "k", "branch", "solver", "fit", "verification", "outputs"}


def _positive(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0 \
            or not math.isfinite(value):
        raise ValidationError(f"{name} must be a positive number, got {value!r}")
    return value


def _grid_spec(name, d) -> dict:
    if not isinstance(d, dict) or set(d) != {"L", "N"}:
        raise ValidationError(f"{name} must be an object with keys L and N")
    L = float(_positive(f"{name}.L", d["L"]))
    N = d["N"]
    if not isinstance(N, int) or isinstance(N, bool):
        raise ValidationError(f"{name}.N must be an integer")
    build_grid(L, N)  # runs the resolution checks
    return {"L": L, "N": N}


@dataclass
class RunConfig:
    grid: dict = field(default_factory=lambda: {"L": 12.0, "N": 96})
    potential: PotentialModel = field(default_factory=PotentialModel)
    k: tuple = (1.0, 0.0)
    branch: SignChoice = SignChoice.PLUS
    solver: dict = field(default_factory=lambda: {"method": "auto", "rule": "diagonal"})
    fit: dict = field(default_factory=lambda: {"rmin": 20.0, "rmax": 200.0, "points": 24})
    verification: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_VERIFICATION))
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = _grid_spec("grid", self.grid)
        if not isinstance(self.potential, PotentialModel):
            self.potential = PotentialModel.from_dict(self.potential)
        self.k = WaveVector(self.k).k
        self.branch = SignChoice.parse(self.branch)
        method = self.solver.get("method", "auto")
        rule = self.solver.get("rule", "diagonal")
        if set(self.solver) - {"method", "rule"}:
            raise ValidationError("solver accepts only method and rule")
        if method not in ("auto", "dense", "fft"):
            raise ValidationError("solver.method must be one of auto, dense, fft")
        if rule not in RULES:
            raise ValidationError(f"solver.rule must be one of {', '.join(RULES)}")
        self.solver = {"method": method, "rule": rule}
        fit = {"rmin": 20.0, "rmax": 200.0, "points": 24, **self.fit}
        if set(fit) != {"rmin", "rmax", "points"}:
            raise ValidationError("fit accepts only rmin, rmax and points")
        rmin, rmax = float(fit["rmin"]), float(fit["rmax"])
        if not 1.0 <= rmin < rmax:
            raise ValidationError("fit window needs 1 <= rmin < rmax")
        if not isinstance(fit["points"], int) or fit["points"] < 6:
            raise ValidationError("fit.points must be an integer >= 6")
        self.fit = {"rmin": rmin, "rmax": rmax, "points": fit["points"]}
        ver = copy.deepcopy(DEFAULT_VERIFICATION)
        unknown = set(self.verification) - set(ver)
        if unknown:
            raise ValidationError(f"unknown verification keys: {sorted(unknown)}")
        ver.update(copy.deepcopy(self.verification))
        for key in ("rate_grid", "sweep_grid", "bank_grid"):
            ver[key] = _grid_spec(f"verification.{key}", ver[key])
        for key in ("sweep_annulus", "bank_annulus"):
            a, b = (float(v) for v in ver[key])
            if not 0 < a < b:
                raise ValidationError(f"verification.{key} needs 0 < a < b")
            ver[key] = [a, b]
        for key in ("sweep_shape", "bank_shape"):
            ver[key] = [int(v) for v in ver[key]]
            if len(ver[key]) != 2 or min(ver[key]) < 1:
                raise ValidationError(f"verification.{key} must be two positive integers")
        levels = [int(n) for n in ver["doubling_levels"]]
        if len(levels) != 3 or any(b != 2 * a for a, b in zip(levels, levels[1:])):
            raise ValidationError("verification.doubling_levels must be three sizes N, 2N, 4N")
        ver["doubling_levels"] = levels
        self.verification = ver
        if not isinstance(self.outputs, dict):
            raise ValidationError("outputs must be an object")

    # -- convenience -----------------------------------------------------
    def build_grid(self) -> QuadratureGrid:
        return build_grid(self.grid["L"], self.grid["N"])

    def wave_vector(self) -> WaveVector:
        return WaveVector(self.k)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "grid": dict(self.grid),
            "potential": self.potential.to_dict(),
            "k": list(self.k),
            "branch": self.branch.value,
            "solver": dict(self.solver),
            "fit": dict(self.fit),
            "verification": copy.deepcopy(self.verification),
            "outputs": dict(self.outputs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ValidationError("run configuration must be a JSON object")
        unknown = set(d) - _TOP_KEYS
        if unknown:
            raise ValidationError(f"unknown configuration keys: {sorted(unknown)}")
        if "potential" not in d:
            raise ValidationError("configuration needs a potential descriptor")
        kw = {key: d[key] for key in _TOP_KEYS if key in d}
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"configuration is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def reference_config(**overrides) -> RunConfig:
    """The reference configuration: power potential, sigma 2.5, L = 12, N = 96."""
    base = RunConfig().to_dict()
    base.update(overrides)
    return RunConfig.from_dict(base)
