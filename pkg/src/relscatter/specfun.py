r"""Bessel :math:`J_0`, Neumann :math:`N_0` and Struve :math:`\mathbf H_0`.

Real arguments are evaluated in two regimes:

* ``Series`` (:math:`\rho <` ``switch_radius``): the defining power series,
  accumulated in extended precision (``numpy.longdouble``) so that the
  cancellation between terms near the upper end of the regime stays below
  :math:`10^{-13}` absolute.
* ``Asymptotic`` (:math:`\rho \ge` ``switch_radius``): Hankel's expansion
  with Watson's coefficients :math:`(0, m)` for :math:`J_0` and :math:`N_0`,
  truncated at the smallest term.  :math:`\mathbf H_0 - N_0` is the Laplace
  transform :math:`\frac{2}{\pi}\int_0^\infty e^{-\rho s}(1+s^2)^{-1/2}ds`,
  whose termwise expansion is the series
  :math:`\frac{2}{\pi}\sum_k (-1)^k\{(2k-1)!!\}^2\rho^{-2k-1}`; the integral
  itself is evaluated with Gauss-Laguerre quadrature because the divergent
  series only reaches :math:`10^{-8}` at :math:`\rho = 18`.

Complex arguments use the power series only and are limited to
``|z| <= complex_radius``.  :math:`N_0` uses the principal branch of
:math:`\log`.

All public functions accept scalars or arrays and broadcast elementwise.
Real input gives real output.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchCut, NonConvergent, ValidationError

EULER_GAMMA = 0.57721566490153286060651209008240243
PI = math.pi

_LD_GAMMA = np.longdouble("0.57721566490153286060651209008240243")
_LD_PI = np.longdouble("3.14159265358979323846264338327950288")

_LAGUERRE_NODES, _LAGUERRE_WEIGHTS = np.polynomial.laguerre.laggauss(30)


class Regime(str, enum.Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation choices for the series evaluations.

    ``tail_tolerance`` is relative: a power series stops once two
    consecutive terms are both below ``tail_tolerance * |partial sum|``.
    """

    max_terms: int = 200
    tail_tolerance: float = 1e-17
    switch_radius: float = 18.0
    complex_radius: float = 30.0

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 30:
            raise ValidationError("max_terms must be an integer >= 30")
        if not 0.0 < self.tail_tolerance <= 1e-8:
            raise ValidationError("tail_tolerance must lie in (0, 1e-8]")
        if not 10.0 <= self.switch_radius <= 100.0:
            raise ValidationError("switch_radius must lie in [10, 100]")
        if self.complex_radius <= 0:
            raise ValidationError("complex_radius must be positive")


DEFAULT_POLICY = SeriesPolicy()


def watson_coefficient(m: int) -> float:
    """Watson's :math:`(0, m) = (-1)^m \\{(2m-1)!!\\}^2 / (m!\\, 2^{2m})`."""
    if m < 0:
        raise ValidationError("m must be nonnegative")
    num = 1
    for i in range(1, m + 1):
        num *= (2 * i - 1) ** 2
    return (-1) ** m * num / (math.factorial(m) * 4**m)


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class AsymptoticSeries:
    """Coefficients of a large-argument expansion, kept for inspection.

    For ``kind="bessel"`` the coefficients are :math:`(0, m)`, used with
    powers :math:`(2\\rho)^{-m}`.  For ``kind="struve"`` they are the
    numerators of :math:`\\frac{2}{\\pi}(-1)^k\\{(2k-1)!!\\}^2\\rho^{-2k-1}`.
    """

    kind: str
    coefficients: tuple

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @classmethod
    def bessel(cls, order: int = 4) -> "AsymptoticSeries":
        return cls("bessel", tuple(watson_coefficient(m) for m in range(order)))

    @classmethod
    def struve(cls, order: int = 4) -> "AsymptoticSeries":
        coeffs = tuple(
            (2.0 / PI) * (-1) ** k * float(_double_factorial(2 * k - 1)) ** 2
            for k in range(order)
        )
        return cls("struve", coeffs)

    def struve_minus_neumann(self, rho):
        """Partial sum of the :math:`\\mathbf H_0 - N_0` expansion at ``rho``."""
        if self.kind != "struve":
            raise ValidationError("only defined for the struve series")
        rho = np.asarray(rho, dtype=float)
        return sum(c * rho ** (-2 * k - 1) for k, c in enumerate(self.coefficients))


# ---------------------------------------------------------------------------
# power series


def _check_tail(term, prev_term, total, tol):
    return bool(np.all((np.abs(term) <= tol * np.abs(total)) & (np.abs(prev_term) <= tol * np.abs(total))))


def _series_j0_n0(x, policy, want_n0: bool):
    """J0 and the harmonic-weighted sum of its terms, in extended precision."""
    q = (x / 2) ** 2
    term = np.ones_like(x)
    j0 = np.ones_like(x)
    hsum = np.zeros_like(x)
    harmonic = np.longdouble(0)
    prev = term
    tol = policy.tail_tolerance
    for n in range(1, policy.max_terms + 1):
        term = -term * q / (n * n)
        harmonic += np.longdouble(1) / n
        j0 = j0 + term
        if want_n0:
            hsum = hsum + term * harmonic
        if _check_tail(term, prev, j0, tol) and (
            not want_n0 or _check_tail(term * harmonic, prev * harmonic, hsum, tol)
        ):
            return j0, hsum
        prev = term
    raise NonConvergent(f"J0/N0 power series did not converge in {policy.max_terms} terms")


def _series_h0(x, policy):
    q = x * x
    term = x.copy()
    total = x.copy()
    prev = term
    tol = policy.tail_tolerance
    for k in range(1, policy.max_terms + 1):
        term = -term * q / ((2 * k + 1) ** 2)
        total = total + term
        if _check_tail(term, prev, total, tol):
            return 2 * total / _LD_PI
        prev = term
    raise NonConvergent(f"H0 power series did not converge in {policy.max_terms} terms")


def _n0_from_series(x, j0, hsum):
    return (2 / _LD_PI) * (j0 * (_LD_GAMMA + np.log(x / 2)) - hsum)


# ---------------------------------------------------------------------------
# large-argument expansions (real rho >= switch_radius)


def _hankel_pq(rho, policy):
    """Hankel's P and Q, truncated at the smallest term or the tolerance."""
    inv = 1.0 / (8.0 * rho)
    b = np.ones_like(rho)
    p = np.ones_like(rho)
    q = np.zeros_like(rho)
    active = np.ones(rho.shape, dtype=bool)
    for m in range(1, policy.max_terms + 1):
        nb = b * (2 * m - 1) ** 2 * inv / m
        active &= (nb < b) & (b > policy.tail_tolerance)
        if not active.any():
            break
        sign = 1.0 if (m // 2) % 2 == 0 else -1.0
        if m % 2 == 0:
            p = np.where(active, p + sign * nb, p)
        else:
            q = np.where(active, q - sign * nb, q)
        b = np.where(active, nb, b)
    return p, q


def _asymptotic_j0_n0(rho, policy):
    p, q = _hankel_pq(rho, policy)
    chi = rho - PI / 4
    amp = np.sqrt(2.0 / (PI * rho))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def struve_minus_neumann(rho):
    r""":math:`\mathbf H_0(\rho) - N_0(\rho)` for real :math:`\rho \ge 10`.

    Gauss-Laguerre evaluation of
    :math:`\frac{2}{\pi}\int_0^\infty e^{-\rho s}(1+s^2)^{-1/2}ds`; accurate
    to about 1e-15 relative once :math:`\rho \ge 10`.
    """
    rho = np.asarray(rho, dtype=float)
    u = _LAGUERRE_NODES
    w = _LAGUERRE_WEIGHTS
    r = rho[..., None]
    return (2.0 / PI) * np.sum(w / np.sqrt(1.0 + (u / r) ** 2), axis=-1) / rho


# ---------------------------------------------------------------------------
# dispatch


def regime_of(rho, policy: SeriesPolicy = DEFAULT_POLICY):
    """Evaluation regime used for each real argument magnitude ``rho``."""
    rho = np.abs(np.asarray(rho))
    out = np.where(rho < policy.switch_radius, Regime.SERIES.value, Regime.ASYMPTOTIC.value)
    return out if out.ndim else str(out)


def _real_triplet(rho, policy, need=("j0", "n0", "h0")):
    """J0, N0, H0 at real rho >= 0 (N0 requires rho > 0)."""
    out = {name: np.empty(rho.shape) for name in need}
    small = rho < policy.switch_radius
    if small.any():
        x = rho[small].astype(np.longdouble)
        if "j0" in need or "n0" in need:
            j0, hsum = _series_j0_n0(x, policy, want_n0="n0" in need)
            if "j0" in need:
                out["j0"][small] = j0.astype(float)
            if "n0" in need:
                out["n0"][small] = _n0_from_series(x, j0, hsum).astype(float)
        if "h0" in need:
            out["h0"][small] = _series_h0(x, policy).astype(float)
    big = ~small
    if big.any():
        r = rho[big]
        j0, n0 = _asymptotic_j0_n0(r, policy)
        if "j0" in need:
            out["j0"][big] = j0
        if "n0" in need:
            out["n0"][big] = n0
        if "h0" in need:
            out["h0"][big] = n0 + struve_minus_neumann(r)
    return out


def _complex_series(z, policy, name):
    if np.any(np.abs(z) > policy.complex_radius):
        raise NonConvergent(
            f"complex argument modulus exceeds the series validity bound {policy.complex_radius}"
        )
    x = z.astype(np.clongdouble)
    if name == "h0":
        return _series_h0(x, policy).astype(complex)
    j0, hsum = _series_j0_n0(x, policy, want_n0=name == "n0")
    if name == "j0":
        return j0.astype(complex)
    return _n0_from_series(x, j0, hsum).astype(complex)


def _on_cut(z):
    z = np.asarray(z)
    return np.any((z.imag == 0) & (z.real <= 0))


def _evaluate(z, policy, name):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        if name == "n0" and _on_cut(z):
            raise BranchCut("N0 is undefined on (-inf, 0] (principal branch of log)")
        out = _complex_series(z.ravel(), policy, name).reshape(z.shape)
        return out if out.ndim else out[()]
    x = z.astype(float)
    if name == "n0" and np.any(x <= 0):
        raise BranchCut("N0 is undefined on (-inf, 0] (principal branch of log)")
    rho = np.abs(x).ravel()
    val = _real_triplet(rho, policy, need=(name,))[name].reshape(x.shape)
    if name == "h0":
        val = np.sign(x) * val
    return val if val.ndim else float(val)


def bessel_j0(z, policy: SeriesPolicy = DEFAULT_POLICY):
    """Bessel function of the first kind of order zero."""
    return _evaluate(z, policy, "j0")


def neumann_n0(z, policy: SeriesPolicy = DEFAULT_POLICY):
    """Neumann function of order zero, principal branch."""
    return _evaluate(z, policy, "n0")


def struve_h0(z, policy: SeriesPolicy = DEFAULT_POLICY):
    """Struve function of order zero."""
    return _evaluate(z, policy, "h0")


def bessel_triplet(rho, policy: SeriesPolicy = DEFAULT_POLICY):
    """``(J0, N0, H0)`` at positive real ``rho``, sharing the series work."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise BranchCut("bessel_triplet requires rho > 0")
    out = _real_triplet(rho.ravel(), policy)
    return tuple(out[k].reshape(rho.shape) for k in ("j0", "n0", "h0"))


def series_only(z, name: str, policy: SeriesPolicy = DEFAULT_POLICY):
    """Power-series value of ``name`` in ``{"j0", "n0", "h0"}``, any regime.

    Exposed for regime-consistency checks; beyond :math:`\\rho \\approx 25`
    the extended-precision accumulation loses accuracy.
    """
    x = np.asarray(z, dtype=float).ravel().astype(np.longdouble)
    if name == "h0":
        out = _series_h0(x, policy)
    else:
        j0, hsum = _series_j0_n0(x, policy, want_n0=name == "n0")
        out = j0 if name == "j0" else _n0_from_series(x, j0, hsum)
    return out.astype(float).reshape(np.shape(z))


def asymptotic_only(rho, name: str, policy: SeriesPolicy = DEFAULT_POLICY):
    """Large-argument value of ``name``, regardless of ``switch_radius``."""
    rho = np.asarray(rho, dtype=float)
    j0, n0 = _asymptotic_j0_n0(rho, policy)
    if name == "j0":
        return j0
    if name == "n0":
        return n0
    return n0 + struve_minus_neumann(rho)
