r"""Integral kernels of the free resolvent of :math:`\sqrt{-\Delta}` on the plane.

For :math:`z \notin [0, \infty)` the resolvent :math:`(\sqrt{-\Delta}-z)^{-1}`
has the radial kernel

.. math::

    g_z(x) = \frac{1}{\pi|x|} + z M_z(x), \qquad
    M_z(x) = \tfrac12\{\mathbf H_0(-|x|z) - N_0(-|x|z)\},

with the principal logarithm inside :math:`N_0`.  On the positive axis the
boundary values are

.. math::

    g^\pm_\lambda(x) = \frac{1}{\pi|x|} + \lambda m^\pm_\lambda(x), \qquad
    m^\pm_\lambda(x) = -\tfrac12\{\mathbf H_0(|x|\lambda) + N_0(|x|\lambda)
                       \mp 2iJ_0(|x|\lambda)\}.

``SignChoice.PLUS`` is the limit from the upper half plane,
:math:`z = \lambda + i\mu`, :math:`\mu \downarrow 0`.  It behaves like the
outgoing wave :math:`(\lambda/\pi)^{1/2}(1+i)e^{i\lambda|x|}|x|^{-1/2}`.
``SignChoice.MINUS`` is its complex conjugate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import specfun
from .errors import BranchCut, DomainError, SingularPoint, ValidationError
from .specfun import DEFAULT_POLICY, SeriesPolicy


class SignChoice(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, value) -> "SignChoice":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"sign must be 'plus' or 'minus', got {value!r}") from None

    @property
    def pm(self) -> int:
        """+1 for PLUS, -1 for MINUS."""
        return 1 if self is SignChoice.PLUS else -1

    def opposite(self) -> "SignChoice":
        return SignChoice.MINUS if self is SignChoice.PLUS else SignChoice.PLUS


@dataclass(frozen=True)
class KernelEvaluation:
    value: complex
    singular_part: float
    smooth_part: complex
    regime: specfun.Regime


def _check_lambda_r(lam, r):
    if not np.all(np.asarray(lam) > 0):
        raise DomainError("lambda must be positive")
    if not np.all(np.asarray(r) > 0):
        raise DomainError("r must be positive")


def m_boundary(lam, r, sign, policy: SeriesPolicy = DEFAULT_POLICY):
    """Boundary-value function :math:`m^\\pm_\\lambda` at radius ``r``.

    Parameters
    ----------
    lam : float
        Energy :math:`\\lambda > 0`.
    r : float or ndarray
        Radii, all positive.
    sign : SignChoice or str

    Returns
    -------
    complex or ndarray of complex
    """
    sign = SignChoice.parse(sign)
    _check_lambda_r(lam, r)
    rho = np.asarray(r, dtype=float) * lam
    j0, n0, h0 = specfun.bessel_triplet(rho, policy)
    out = -0.5 * (h0 + n0) + 1j * sign.pm * j0
    return out if out.ndim else complex(out)


def boundary_kernel_radial(lam, r, sign, policy: SeriesPolicy = DEFAULT_POLICY):
    """Array form of :math:`g^\\pm_\\lambda` as a function of ``r = |x| > 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise SingularPoint("kernel requested at zero displacement")
    return 1.0 / (math.pi * r) + lam * m_boundary(lam, r, sign, policy)


def _norm(displacement) -> float:
    d = np.asarray(displacement, dtype=float)
    if d.shape != (2,):
        raise ValidationError("displacement must be a 2-vector")
    return float(np.hypot(d[0], d[1]))


def g_boundary(lam, displacement, sign, policy: SeriesPolicy = DEFAULT_POLICY) -> KernelEvaluation:
    """Boundary kernel :math:`g^\\pm_\\lambda` at a planar displacement."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    r = _norm(displacement)
    if r == 0.0:
        raise SingularPoint("kernel requested at zero displacement")
    singular = 1.0 / (math.pi * r)
    smooth = lam * m_boundary(lam, r, sign, policy)
    return KernelEvaluation(
        value=singular + smooth,
        singular_part=singular,
        smooth_part=smooth,
        regime=specfun.Regime(specfun.regime_of(r * lam, policy)),
    )


def g_resolvent(z, displacement, policy: SeriesPolicy = DEFAULT_POLICY) -> KernelEvaluation:
    """Resolvent kernel :math:`g_z` for :math:`z \\notin [0, \\infty)`.

    Evaluated with the complex power series, so ``|z|*|x|`` is limited to
    ``policy.complex_radius``.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise BranchCut("g_resolvent requires z outside [0, inf)")
    r = _norm(displacement)
    if r == 0.0:
        raise SingularPoint("kernel requested at zero displacement")
    w = np.asarray(-r * z, dtype=complex)
    big_m = 0.5 * (specfun.struve_h0(w, policy) - specfun.neumann_n0(w, policy))
    singular = 1.0 / (math.pi * r)
    smooth = z * complex(big_m)
    return KernelEvaluation(singular + smooth, singular, smooth, specfun.Regime.SERIES)


def poisson_laplace_oracle(z, r, tol: float = 1e-10) -> complex:
    r"""Laplace transform of the Poisson kernel, an independent route to :math:`g_z`.

    Computes :math:`\int_0^\infty e^{tz}\, t\,\pi^{-1}(t^2+r^2)^{-3/2}\,dt`
    by adaptive quadrature.  The range is cut at :math:`T` with
    :math:`e^{T\,\mathrm{Re} z}/(\pi r) \le 10^{-12}`; the remaining tail is
    smaller still because the algebraic factor is bounded by
    :math:`1/(\pi r)` times :math:`t/r^{\,2}`-decay.  When ``Im z != 0`` the
    interval is split into panels of one oscillation period.
    """
    z = complex(z)
    if not z.real < 0:
        raise DomainError("poisson_laplace_oracle requires Re z < 0")
    if not r > 0:
        raise DomainError("r must be positive")
    big_t = math.log(1e-12 * math.pi * r) / z.real
    big_t = max(big_t, 10.0 * r)
    edges = [0.0]
    # resolve the algebraic scale near t ~ r first
    for t in (0.5 * r, r, 2.0 * r, 4.0 * r):
        if t < big_t:
            edges.append(t)
    if z.imag != 0.0:
        period = 2.0 * math.pi / abs(z.imag)
        t = edges[-1] + period
        while t < big_t:
            edges.append(t)
            t += period
    else:
        t = edges[-1] * 2.0
        while t < big_t:
            edges.append(t)
            t *= 2.0
    edges.append(big_t)

    def integrand(t, part):
        v = np.exp(t * z) * t / (math.pi * (t * t + r * r) ** 1.5)
        return v.real if part == 0 else v.imag

    total = 0.0 + 0.0j
    per_panel = tol / len(edges)
    for a, b in zip(edges[:-1], edges[1:]):
        re, _ = integrate.quad(integrand, a, b, args=(0,), epsabs=per_panel, epsrel=1e-13, limit=200)
        im = 0.0
        if z.imag != 0.0:
            im, _ = integrate.quad(integrand, a, b, args=(1,), epsabs=per_panel, epsrel=1e-13, limit=200)
        total += re + 1j * im
    return total
