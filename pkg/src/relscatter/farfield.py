r"""Far-field amplitude, large-radius scans and the generalized Fourier transform.

For a solved field :math:`\varphi^\pm` the amplitude is

.. math::

    f^\pm(\lambda,\omega_x,\omega_k) = (\lambda/\pi)^{1/2}(1\mp i)
        \int e^{\pm i\lambda\omega_x\cdot y}\,\psi^\pm(y)\,dy,
    \qquad \psi^\pm = V\varphi^\pm .

Because the scattered wave enters the integral equation with a minus sign,
the far field of the solution is

.. math::

    \varphi^\pm(r\omega_x) - \varphi_0(r\omega_x)
        = -\frac{e^{\mp i\lambda r}}{r^{1/2}} f^\pm + o(r^{-1/2}),

and :func:`remainder_scan` measures the distance to that two-term model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientBank, ValidationError
from .potential import PotentialModel
from .quadrature import QuadratureGrid
from .solver import ScatteringField, WaveVector, plane_wave, scattered_part, solve_ls

MIN_MODULI = 16
MIN_ANGLES = 32


@dataclass(frozen=True)
class FarFieldAmplitude:
    lam: float
    omega_k: tuple
    thetas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def directions(self) -> np.ndarray:
        return np.column_stack([np.cos(self.thetas), np.sin(self.thetas)])


def _unit(omega) -> np.ndarray:
    w = np.atleast_2d(np.asarray(omega, dtype=float))
    norms = np.hypot(w[:, 0], w[:, 1])
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise ValidationError("omega_x must be a unit vector")
    return w


def far_amplitude(field: ScatteringField, omega_x):
    """Amplitude :math:`f^\\pm` in direction(s) ``omega_x`` (shape ``(2,)`` or ``(m, 2)``)."""
    w = _unit(omega_x)
    s = field.branch.pm
    lam = field.lam
    phase = np.exp(1j * s * lam * (w @ field.grid.nodes.T))
    vals = math.sqrt(lam / math.pi) * (1 - 1j * s) * (phase @ (field.psi * field.grid.weights))
    if np.ndim(omega_x) == 1:
        return complex(vals[0])
    return vals


def far_amplitude_table(field: ScatteringField, directions: int = 64) -> FarFieldAmplitude:
    """Amplitude on ``directions`` equispaced angles in ``[0, 2pi)``."""
    thetas = 2.0 * math.pi * np.arange(directions) / directions
    omegas = np.column_stack([np.cos(thetas), np.sin(thetas)])
    return FarFieldAmplitude(field.lam, tuple(field.k.omega_k), thetas, far_amplitude(field, omegas))


def default_radii(rmin: float = 20.0, rmax: float = 200.0, count: int = 24) -> np.ndarray:
    return np.geomspace(rmin, rmax, count)


def _scan_points(omega_x, radii):
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 1.0):
        raise ValidationError("scan radii must be >= 1")
    if np.any(np.diff(radii) <= 0):
        raise ValidationError("scan radii must be strictly increasing")
    w = _unit(omega_x)[0]
    return radii, radii[:, None] * w[None, :]


def planewave_diff_scan(field: ScatteringField, omega_x, radii) -> np.ndarray:
    """Rows ``(r, |phi(r w) - phi0(r w)|)``."""
    radii, pts = _scan_points(omega_x, radii)
    return np.column_stack([radii, np.abs(scattered_part(field, pts))])


def remainder_scan(field: ScatteringField, omega_x, radii) -> np.ndarray:
    """Rows ``(r, |phi - phi0 + e^{-+i lam r} r^{-1/2} f|)`` along ``omega_x``."""
    radii, pts = _scan_points(omega_x, radii)
    scat = scattered_part(field, pts)
    f = far_amplitude(field, _unit(omega_x)[0])
    spherical = np.exp(-1j * field.branch.pm * field.lam * radii) / np.sqrt(radii) * f
    return np.column_stack([radii, np.abs(scat + spherical)])


def scan_pair(field: ScatteringField, omega_x, radii):
    """Both scans from a single evaluation of the scattered wave.

    Returns ``(diff, remainder)`` in the row format of
    :func:`planewave_diff_scan` and :func:`remainder_scan`.
    """
    radii, pts = _scan_points(omega_x, radii)
    scat = scattered_part(field, pts)
    f = far_amplitude(field, _unit(omega_x)[0])
    spherical = np.exp(-1j * field.branch.pm * field.lam * radii) / np.sqrt(radii) * f
    return (np.column_stack([radii, np.abs(scat)]),
            np.column_stack([radii, np.abs(scat + spherical)]))


def forward_direction(field: ScatteringField) -> np.ndarray:
    """Direction in which the scattered wave of ``phi^branch`` propagates with the plane wave.

    For ``phi^-`` (outgoing spherical wave) this is ``omega_k``; for
    ``phi^+`` (incoming) it is ``-omega_k``.
    """
    return -field.branch.pm * field.k.omega_k


# ---------------------------------------------------------------------------
# generalized Fourier transform


@dataclass
class FieldBank:
    """Solved fields on a polar k-grid covering the annulus ``a <= |k| <= b``.

    Moduli are Gauss-Legendre nodes on ``[a, b]`` and angles are equispaced.
    ``k_weights`` holds the polar area element so that sums over the bank
    approximate integrals over the annulus.
    """

    a: float
    b: float
    moduli: np.ndarray
    angles: np.ndarray
    k_points: np.ndarray
    k_weights: np.ndarray
    fields: list

    @property
    def grid(self) -> QuadratureGrid:
        return self.fields[0].grid

    @property
    def shape(self):
        return len(self.moduli), len(self.angles)

    def value_matrix(self) -> np.ndarray:
        """``(n_k, n_nodes)`` array of nodal field values."""
        return np.vstack([f.values for f in self.fields])


def k_quadrature(a: float, b: float, n_moduli: int, n_angles: int):
    """Polar quadrature on the annulus: returns ``(moduli, angles, points, weights)``."""
    if not 0 < a < b:
        raise ValidationError("annulus requires 0 < a < b")
    x, w = np.polynomial.legendre.leggauss(n_moduli)
    moduli = 0.5 * (b - a) * x + 0.5 * (b + a)
    wm = 0.5 * (b - a) * w * moduli
    angles = 2.0 * math.pi * np.arange(n_angles) / n_angles
    kk = moduli[:, None, None] * np.stack([np.cos(angles), np.sin(angles)], axis=-1)[None, :, :]
    weights = (wm[:, None] * (2.0 * math.pi / n_angles) * np.ones(n_angles)[None, :]).ravel()
    return moduli, angles, kk.reshape(-1, 2), weights


def build_field_bank(grid: QuadratureGrid, model: PotentialModel, branch, a: float, b: float,
                     n_moduli: int = MIN_MODULI, n_angles: int = MIN_ANGLES,
                     method: str = "auto") -> FieldBank:
    """Solve for ``phi^branch`` at every point of the annulus quadrature."""
    moduli, angles, pts, weights = k_quadrature(a, b, n_moduli, n_angles)
    fields = [solve_ls(grid, model, WaveVector(k), branch, method=method) for k in pts]
    return FieldBank(a, b, moduli, angles, pts, weights, fields)


def _check_bank(bank: FieldBank, min_moduli: int, min_angles: int):
    nm, na = bank.shape
    if nm < min_moduli or na < min_angles:
        raise InsufficientBank(
            f"field bank has {nm} moduli x {na} angles; at least {min_moduli} x {min_angles} required"
        )


def generalized_transform(bank: FieldBank, u, min_moduli: int = MIN_MODULI,
                          min_angles: int = MIN_ANGLES) -> np.ndarray:
    """:math:`\\mathcal F_\\pm u(k_m) = (2\\pi)^{-1}\\sum_i u(x_i)\\overline{\\varphi^\\pm(x_i,k_m)}w_i`."""
    _check_bank(bank, min_moduli, min_angles)
    u = np.asarray(u)
    w = bank.grid.weights
    return np.conj(bank.value_matrix()) @ (u * w) / (2.0 * math.pi)


def band_projection(bank: FieldBank, u, **kw) -> np.ndarray:
    """``P u(x_i) = (2pi)^{-1} sum_m F u(k_m) phi(x_i, k_m) w_m`` on the grid nodes."""
    fu = generalized_transform(bank, u, **kw)
    return bank.value_matrix().T @ (fu * bank.k_weights) / (2.0 * math.pi)


def projector_check(bank: FieldBank, u, a: float | None = None, b: float | None = None, **kw) -> float:
    """Relative idempotence defect ``||P(Pu) - Pu|| / ||Pu||`` of the band projector.

    ``a`` and ``b``, when given, must match the annulus of the bank.
    """
    if a is not None and not math.isclose(a, bank.a):
        raise ValidationError("a does not match the field bank annulus")
    if b is not None and not math.isclose(b, bank.b):
        raise ValidationError("b does not match the field bank annulus")
    pu = band_projection(bank, u, **kw)
    ppu = band_projection(bank, pu, **kw)
    w = bank.grid.weights
    norm = math.sqrt(float(np.sum(np.abs(pu) ** 2 * w)))
    if norm == 0.0:
        return 0.0
    return math.sqrt(float(np.sum(np.abs(ppu - pu) ** 2 * w))) / norm


def fourier_oracle(grid: QuadratureGrid, u, k_points) -> np.ndarray:
    """Direct-summation Fourier transform ``(2pi)^{-1} sum_i u_i e^{-i k x_i} w_i``."""
    u = np.asarray(u)
    out = np.empty(len(k_points), dtype=complex)
    for m, k in enumerate(np.asarray(k_points)):
        out[m] = np.sum(u * np.conj(plane_wave(grid.nodes, WaveVector(k))) * grid.weights)
    return out / (2.0 * math.pi)
