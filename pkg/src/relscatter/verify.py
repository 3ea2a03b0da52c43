r"""Riesz potentials, convolution-decay integrals and power-law fitting.

The Riesz operators on the plane are

.. math::

    T_j u(x) = \int_{\mathbb R^2} |x-y|^{-j} u(y)\,dy, \qquad j \in \{1, 1/2\},

discretised on a :class:`~relscatter.quadrature.QuadratureGrid` with the same
diagonal replacement as the scattering kernel.  :func:`convolution_phi`
computes the convolution :math:`\int |x-y|^{-\beta}\langle y\rangle^{-\gamma}dy`
by a one-dimensional radial integral, and :func:`fit_power_law` turns
sampled decay into a measured exponent.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, ValidationError
from .quadrature import KernelKind, QuadratureGrid, cell_integral, offset_table
from .solver import ScatteringField, ToeplitzOperator

_KIND = {1.0: KernelKind.INVERSE_DISTANCE, 0.5: KernelKind.INVERSE_SQRT}


class DegenerateFit(UserWarning):
    """A power-law fit whose data are too flat or too noisy to trust."""


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    intercept: float
    r_squared: float
    window: tuple
    n_points: int
    degenerate: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent, "intercept": self.intercept, "r_squared": self.r_squared,
            "window": list(self.window), "n_points": self.n_points,
            "degenerate": self.degenerate, "reason": self.reason,
        }


def fit_power_law(points, window=None) -> PowerLawFit:
    """Least-squares fit of ``log value = intercept + exponent * log r``.

    Parameters
    ----------
    points : array_like, shape (m, 2)
        Rows ``(r, value)``.
    window : (float, float), optional
        Only rows with ``rmin <= r <= rmax`` are used; defaults to all rows.

    Returns
    -------
    PowerLawFit
        ``degenerate`` is set (and a :class:`DegenerateFit` warning issued)
        when the values span less than one decade or ``r_squared < 0.5``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must have shape (m, 2)")
    if window is None:
        window = (float(pts[:, 0].min()), float(pts[:, 0].max()))
    rmin, rmax = window
    sel = pts[(pts[:, 0] >= rmin * (1 - 1e-12)) & (pts[:, 0] <= rmax * (1 + 1e-12))]
    if len(sel) < 6:
        raise ValidationError(f"power-law fit needs at least 6 points in the window, got {len(sel)}")
    if np.any(sel[:, 1] <= 0) or np.any(sel[:, 0] <= 0):
        raise ValidationError("power-law fit needs positive radii and values")
    lx, ly = np.log(sel[:, 0]), np.log(sel[:, 1])
    (slope, icpt), res, *_ = np.linalg.lstsq(np.column_stack([lx, np.ones_like(lx)]), ly, rcond=None)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum((ly - (slope * lx + icpt)) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    reasons = []
    if ly.max() - ly.min() < math.log(10.0):
        reasons.append("values span less than one decade")
    if r2 < 0.5:
        reasons.append(f"r_squared = {r2:.3f} < 0.5")
    reason = "; ".join(reasons)
    if reason:
        warnings.warn(f"degenerate power-law fit: {reason}", DegenerateFit, stacklevel=2)
    return PowerLawFit(float(slope), float(icpt), r2, (float(rmin), float(rmax)), len(sel),
                       bool(reasons), reason)


def ratio_spread(values) -> float:
    """``max / min`` of a positive sequence, used for the log-corrected cases."""
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min())


# ---------------------------------------------------------------------------
# Riesz potentials


def _riesz_kind(j) -> KernelKind:
    try:
        return _KIND[float(j)]
    except KeyError:
        raise ValidationError("Riesz exponent j must be 1 or 1/2") from None


def riesz_apply(j, u, x, grid: QuadratureGrid) -> float:
    """:math:`T_j u(x)` by direct summation over the grid.

    A point within ``h/10`` of a node uses the exact self-cell integral of
    :math:`|y|^{-j}` for that node.
    """
    kind = _riesz_kind(j)
    u = np.asarray(u)
    x = np.asarray(x, dtype=float)
    r = np.hypot(grid.nodes[:, 0] - x[0], grid.nodes[:, 1] - x[1])
    near = r < 0.1 * grid.h
    kern = np.where(near, 0.0, np.where(near, 1.0, r) ** (-float(j)) * grid.weights)
    kern = kern + near * cell_integral(kind, grid.h)
    out = np.sum(kern * u)
    return float(out) if not np.iscomplexobj(out) else complex(out)


def riesz_table(j, grid: QuadratureGrid) -> np.ndarray:
    kind = _riesz_kind(j)
    return offset_table(grid, lambda r: r ** (-float(j)), cell_integral(kind, grid.h))


def riesz_apply_grid(j, u, grid: QuadratureGrid) -> np.ndarray:
    """:math:`T_j u` at every node, by FFT.  Real input gives real output."""
    u = np.asarray(u)
    out = ToeplitzOperator(riesz_table(j, grid)).apply(u)
    return out if np.iscomplexobj(u) else out.real


def riesz_split(u, x, grid: QuadratureGrid):
    """Split :math:`T_1 u(x)` into the parts from ``|x - y| <= 1`` and ``|x - y| > 1``."""
    u = np.asarray(u)
    x = np.asarray(x, dtype=float)
    r = np.hypot(grid.nodes[:, 0] - x[0], grid.nodes[:, 1] - x[1])
    near = r < 0.1 * grid.h
    kern = np.where(near, cell_integral(KernelKind.INVERSE_DISTANCE, grid.h),
                    grid.weights / np.where(near, 1.0, r))
    terms = kern * u
    inner = r <= 1.0
    near_sum = np.sum(np.where(inner, terms, 0.0))
    far_sum = np.sum(np.where(inner, 0.0, terms))
    return near_sum, far_sum


# ---------------------------------------------------------------------------
# convolution decay


def _angular_average(beta, R, s):
    """:math:`\\int_0^{2\\pi}|x-y|^{-\\beta}d\\theta` for ``|x| = R``, ``|y| = s``."""
    hi = max(R, s)
    lo = min(R, s)
    return 2.0 * math.pi * hi ** (-beta) * special.hyp2f1(0.5 * beta, 0.5 * beta, 1.0, (lo / hi) ** 2)


def convolution_phi(beta: float, gamma: float, x, rel_tail: float = 1e-4) -> float:
    r""":math:`\Phi(x) = \int_{\mathbb R^2}|x-y|^{-\beta}\langle y\rangle^{-\gamma}\,dy`.

    The angular integral is done in closed form with the hypergeometric
    function, leaving an integral in :math:`|y|` that is split at
    :math:`|y| = |x|`.  The outer radius :math:`S` is doubled until the
    analytic tail bound :math:`2\pi\,2^\beta S^{2-\beta-\gamma}/(\beta+\gamma-2)`
    is at most ``rel_tail`` times the computed value.
    """
    if not 0 < beta < 2:
        raise DomainError("beta must lie in (0, 2)")
    if not beta + gamma > 2:
        raise DomainError("beta + gamma must exceed 2 for the integral to converge")
    x = np.asarray(x, dtype=float)
    R = float(np.hypot(x[0], x[1]))

    def f(s):
        return s * (1.0 + s * s) ** (-0.5 * gamma) * _angular_average(beta, R, s)

    def piece(a, b):
        return integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-10, limit=400)[0]

    def tail_bound(S):
        return 2.0 * math.pi * 2.0**beta * S ** (2.0 - beta - gamma) / (beta + gamma - 2.0)

    if R > 0:
        total = piece(0.0, R) + piece(R, 2.0 * R)
        S = 2.0 * R
    else:
        total = 0.0
        S = 0.0
    edge = max(S, 1.0)
    if S < edge:
        total += piece(S, edge)
        S = edge
    while True:
        total += piece(S, 2.0 * S)
        S *= 2.0
        if S > 2.0 * R and tail_bound(S) <= rel_tail * total:
            break
        if S > 1e30:
            break
    return total


# ---------------------------------------------------------------------------
# pointwise resolvent bound


@dataclass(frozen=True)
class ResolventBound:
    lhs: np.ndarray
    t1: np.ndarray
    t_half: np.ndarray

    def violation(self, c: float) -> float:
        gap = self.lhs - self.t1 / math.pi - c * self.t_half
        return float(max(0.0, np.max(gap)))

    def minimal_constant(self) -> float:
        """Smallest ``C`` at which the violation measure is zero."""
        gap = self.lhs - self.t1 / math.pi
        pos = self.t_half > 0
        if not np.any(gap[pos] > 0):
            return 0.0
        bad = (gap > 0) & ~pos
        if np.any(bad):
            return math.inf
        return float(np.max(gap[pos] / self.t_half[pos]))


def resolvent_bound_terms(field: ScatteringField) -> ResolventBound:
    """Nodal values of ``|G psi|``, ``|T_1 psi|`` and ``T_{1/2}|psi|``."""
    grid = field.grid
    psi = field.psi
    lhs = np.abs(ToeplitzOperator(field.table()).apply(psi))
    t1 = np.abs(riesz_apply_grid(1, psi.astype(complex), grid))
    th = riesz_apply_grid(0.5, np.abs(psi), grid)
    return ResolventBound(lhs, t1, th)


def resolvent_bound_check(field: ScatteringField, c_values=None) -> float:
    """Minimum over trial constants of the pointwise bound violation.

    The violation at constant ``C`` is
    ``max_x [ |G psi|(x) - |T_1 psi(x)|/pi - C T_{1/2}|psi|(x) ]_+`` on the
    grid nodes; it is nonincreasing in ``C``.  ``c_values`` defaults to
    1001 equispaced values on ``[0, 100]``.
    """
    if c_values is None:
        c_values = np.linspace(0.0, 100.0, 1001)
    terms = resolvent_bound_terms(field)
    return min(terms.violation(c) for c in c_values)
