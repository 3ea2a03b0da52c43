"""Decaying real potentials.

Three families are provided:

``power``
    ``coupling * (1 + |x - c|^2)^(-sigma/2)``, the model that realises each
    decay regime exactly.
``gaussian``
    ``coupling * exp(-|x - c|^2 / (2 width^2))``.
``bump``
    ``coupling * exp(-width^2 / (width^2 - |x - c|^2))`` inside the disk of
    radius ``width`` and zero outside.

Every potential must satisfy ``|V(x)| <= C <x>^(-sigma)`` with
``sigma > 3/2``; for the two rapidly decaying families ``sigma`` is stored as
``inf``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import ValidationError

SIGMA_MIN = 1.5


class PotentialKind(str, enum.Enum):
    POWER = "power"
    GAUSSIAN = "gaussian"
    BUMP = "bump"


@dataclass(frozen=True)
class PotentialModel:
    kind: PotentialKind = PotentialKind.POWER
    sigma: float = 2.5
    coupling: float = 0.3
    center: tuple = (0.0, 0.0)
    width: float = 1.0

    def __post_init__(self):
        try:
            kind = PotentialKind(self.kind)
        except ValueError:
            raise ValidationError(
                f"unknown potential kind {self.kind!r}; expected power, gaussian or bump"
            ) from None
        object.__setattr__(self, "kind", kind)
        center = tuple(float(c) for c in np.asarray(self.center, dtype=float).ravel())
        if len(center) != 2:
            raise ValidationError("center must be a 2-vector")
        object.__setattr__(self, "center", center)
        if not math.isfinite(self.coupling):
            raise ValidationError("coupling must be finite")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValidationError("width must be positive")
        if kind is PotentialKind.POWER:
            if not self.sigma > SIGMA_MIN or not math.isfinite(self.sigma):
                raise ValidationError(
                    f"sigma = {self.sigma} violates the decay assumption |V(x)| <= C<x>^-sigma "
                    f"with sigma > 3/2"
                )
        else:
            object.__setattr__(self, "sigma", math.inf)

    @property
    def is_radial(self) -> bool:
        return self.center == (0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.coupling == 0.0

    def scaled(self, factor: float) -> "PotentialModel":
        """Same shape with the coupling multiplied by ``factor``."""
        return PotentialModel(self.kind, self.sigma, self.coupling * factor, self.center, self.width)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "sigma": None if math.isinf(self.sigma) else self.sigma,
            "coupling": self.coupling,
            "center": list(self.center),
            "width": self.width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialModel":
        unknown = set(d) - {"kind", "sigma", "coupling", "center", "width"}
        if unknown:
            raise ValidationError(f"unknown potential fields: {sorted(unknown)}")
        sigma = d.get("sigma", 2.5)
        return cls(
            kind=d.get("kind", "power"),
            sigma=math.inf if sigma is None else float(sigma),
            coupling=float(d.get("coupling", 0.3)),
            center=tuple(d.get("center", (0.0, 0.0))),
            width=float(d.get("width", 1.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PotentialModel":
        return cls.from_dict(json.loads(text))


def zero_potential() -> PotentialModel:
    return PotentialModel(PotentialKind.POWER, 2.5, 0.0)


def eval_potential(model: PotentialModel, x) -> np.ndarray:
    """Evaluate V at points ``x`` of shape ``(..., 2)``.

    Returns a real array of shape ``x.shape[:-1]`` (a float for one point).
    """
    x = np.asarray(x, dtype=float)
    d = x - np.asarray(model.center)
    r2 = np.einsum("...i,...i->...", d, d)
    if model.kind is PotentialKind.POWER:
        v = model.coupling * (1.0 + r2) ** (-0.5 * model.sigma)
    elif model.kind is PotentialKind.GAUSSIAN:
        v = model.coupling * np.exp(-r2 / (2.0 * model.width**2))
    else:
        w2 = model.width**2
        inside = r2 < w2
        gap = np.where(inside, w2 - r2, 1.0)
        v = np.where(inside, model.coupling * np.exp(-w2 / gap), 0.0)
    return v if np.ndim(v) else float(v)


def envelope_sample_points(samples: int, radius: float = 1e3) -> np.ndarray:
    """Deterministic Halton points filling the disk of the given radius.

    The radial coordinate is spread logarithmically so that both the core and
    the far tail are represented.
    """
    u = qmc.Halton(d=2, scramble=False).random(samples + 1)[1:]
    r = np.expm1(u[:, 0] * math.log1p(radius))
    theta = 2.0 * math.pi * u[:, 1]
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def decay_envelope_check(model: PotentialModel, sigma_claim: float, samples: int = 10_000) -> bool:
    """Whether ``|V(x)| <x - c>^sigma_claim <= |coupling|`` on sampled points."""
    if not sigma_claim > SIGMA_MIN:
        raise ValidationError("sigma_claim must exceed 3/2")
    if samples < 1:
        raise ValidationError("samples must be positive")
    pts = envelope_sample_points(samples) + np.asarray(model.center)
    d = pts - np.asarray(model.center)
    bracket = np.sqrt(1.0 + np.einsum("ij,ij->i", d, d))
    v = np.abs(eval_potential(model, pts))
    scaled = v * bracket**sigma_claim
    return bool(np.all(scaled <= abs(model.coupling) * (1.0 + 1e-12)))
