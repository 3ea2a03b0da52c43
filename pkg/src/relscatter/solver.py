r"""Nyström solver for the Lippmann-Schwinger equation.

The generalized eigenfunctions solve

.. math::

    \varphi^\pm(x, k) = e^{ix\cdot k}
        - \int g^\mp_{|k|}(x-y)\, V(y)\varphi^\pm(y, k)\,dy .

On a :class:`~relscatter.quadrature.QuadratureGrid` this becomes
``(I + K diag(V)) phi = phi0`` where ``K`` is block Toeplitz: entry
``(I, J)`` depends only on the lattice offset of the two nodes.  ``K`` is
stored through its offset table, which gives both a dense assembly and an
``O(n log n)`` matrix-vector product by circulant embedding.

Two solution paths are available.  ``"dense"`` is a direct LU solve with a
LAPACK condition estimate and is used for the reference configurations.
``"fft"`` runs GMRES on the FFT product and serves the large domains needed
by the far-field rate scans.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import NearSingular, ValidationError
from .kernel import SignChoice, m_boundary
from .potential import PotentialModel, eval_potential
from .quadrature import (KernelKind, QuadratureGrid, cell_integral, expand_table,
                         inverse_distance_cell_average, log_distance_cell_average)
from .specfun import DEFAULT_POLICY, EULER_GAMMA, SeriesPolicy

log = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
DENSE_MAX_UNKNOWNS = 128**2


@dataclass(frozen=True)
class WaveVector:
    k: tuple

    def __post_init__(self):
        k = tuple(float(c) for c in np.asarray(self.k, dtype=float).ravel())
        if len(k) != 2:
            raise ValidationError("k must be a 2-vector")
        if math.hypot(*k) == 0.0:
            raise ValidationError("k must be nonzero (|k| is the energy and must be positive)")
        object.__setattr__(self, "k", k)

    @classmethod
    def polar(cls, modulus: float, angle: float) -> "WaveVector":
        return cls((modulus * math.cos(angle), modulus * math.sin(angle)))

    @property
    def lam(self) -> float:
        return math.hypot(*self.k)

    @property
    def omega_k(self) -> np.ndarray:
        return np.asarray(self.k) / self.lam

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.k)

    def __neg__(self) -> "WaveVector":
        return WaveVector((-self.k[0], -self.k[1]))


def kernel_sign(branch) -> SignChoice:
    """Sign of the boundary kernel used by the field ``phi^branch``.

    ``phi^+`` is built from ``g^-`` and ``phi^-`` from ``g^+``.  Every part of
    the package goes through this function to get that pairing.
    """
    return SignChoice.parse(branch).opposite()


def plane_wave(x, k: WaveVector):
    """:math:`e^{ix\\cdot k}` at points ``x`` of shape ``(..., 2)``."""
    x = np.asarray(x, dtype=float)
    out = np.exp(1j * (x @ k.array))
    return out if np.ndim(out) else complex(out)


def diagonal_weight(h: float, lam: float, sign, policy: SeriesPolicy = DEFAULT_POLICY) -> complex:
    r"""Integral of :math:`g^\pm_\lambda` over the self cell of side ``h``.

    The :math:`1/(\pi|y|)` part is integrated exactly.  For the
    :math:`\lambda m` part the small-argument form
    :math:`m \approx -\pi^{-1}(\gamma + \ln(\lambda|y|/2)) \pm i` is integrated
    exactly; the remainder vanishes at the cell centre, so its midpoint value
    is zero.
    """
    sign = SignChoice.parse(sign)
    area = h * h
    singular = cell_integral(KernelKind.INVERSE_DISTANCE, h) / math.pi
    log_part = cell_integral(KernelKind.LOG_SINGULAR, h) - area * math.log(lam / 2.0)
    m_int = (log_part - area * EULER_GAMMA) / math.pi + 1j * sign.pm * area
    return singular + lam * m_int


RULES = ("diagonal", "cell_average")
EXACT_CELLS = 32.0


def _check_rule(rule):
    if rule not in RULES:
        raise ValidationError(f"quadrature rule must be one of {RULES}, got {rule!r}")


def kernel_weights(h: float, lam: float, sign, dx, dy, rule: str = "diagonal",
                   policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
    r"""Quadrature weights of :math:`g^\pm_\lambda` for cells at offsets ``(dx, dy)``.

    ``rule="cell_average"`` is product integration against a piecewise
    constant density.  The kernel is split as

    .. math::

        g = \frac{1}{\pi r} - \frac{\lambda}{\pi}\ln r + \lambda s(r),
        \qquad s(r) = m^\pm_\lambda(r) + \frac{1}{\pi}\ln r,

    the first two terms are averaged exactly over each cell within 32 cells
    of the evaluation point and the continuous remainder :math:`s` is taken
    at the cell centre.

    ``rule="diagonal"`` takes the kernel at the cell centre.

    In both rules an offset shorter than ``h/10`` is treated as the self
    cell.  For the diagonal rule it receives :func:`diagonal_weight`; for the
    cell-average rule :math:`s` is replaced by its limit
    :math:`-(\gamma + \ln(\lambda/2))/\pi \pm i` at zero offset, which
    reproduces :func:`diagonal_weight` exactly at a node.
    """
    _check_rule(rule)
    sign = SignChoice.parse(sign)
    dx, dy = np.broadcast_arrays(np.asarray(dx, dtype=float), np.asarray(dy, dtype=float))
    r = np.hypot(dx, dy)
    near = r < 0.1 * h
    r_safe = np.where(near, 1.0, r)
    m = np.asarray(m_boundary(lam, r_safe, sign, policy))
    area = h * h
    if rule == "diagonal":
        w = (1.0 / (math.pi * r_safe) + lam * m) * area
        return np.where(near, diagonal_weight(h, lam, sign, policy), w)
    close = r < EXACT_CELLS * h
    s_limit = -(EULER_GAMMA + math.log(lam / 2.0)) / math.pi + 1j * sign.pm
    s = np.where(near, s_limit, m + np.log(r_safe) / math.pi)
    mean_log = np.zeros(r.shape)
    if np.any(close):
        mean_log[close] = log_distance_cell_average(dx[close], dy[close], h)
    smooth = np.where(close, -mean_log / math.pi + s, m)
    singular = inverse_distance_cell_average(dx, dy, h) / math.pi
    return (singular + lam * smooth) * area


def kernel_table(grid: QuadratureGrid, lam: float, sign, policy: SeriesPolicy = DEFAULT_POLICY,
                 rule: str = "diagonal") -> np.ndarray:
    """Kernel weights on all lattice offsets ``(|di|, |dj|)``, shape ``(N, N)``."""
    d = np.arange(grid.N) * grid.h
    return kernel_weights(grid.h, lam, sign, d[:, None], d[None, :], rule, policy)


class ToeplitzOperator:
    """Matrix-free product with the block-Toeplitz kernel matrix ``K``."""

    def __init__(self, table: np.ndarray):
        n = table.shape[0]
        self.n = n
        idx = np.arange(2 * n)
        fold = np.minimum(idx, 2 * n - idx)
        fold[n] = 0
        circ = table[fold[:, None], fold[None, :]]
        circ[n, :] = 0.0
        circ[:, n] = 0.0
        self._spectrum = np.fft.fft2(circ)

    def apply(self, u: np.ndarray) -> np.ndarray:
        n = self.n
        pad = np.zeros((2 * n, 2 * n), dtype=complex)
        pad[:n, :n] = np.asarray(u).reshape(n, n)
        out = np.fft.ifft2(np.fft.fft2(pad) * self._spectrum)[:n, :n]
        return out.ravel()


@dataclass
class ScatteringField:
    grid: QuadratureGrid
    k: WaveVector
    branch: SignChoice
    values: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    residual_norm: float
    model: PotentialModel | None = None
    method: str = "dense"
    rule: str = "diagonal"
    condition_estimate: float | None = None
    iterations: int | None = None
    policy: SeriesPolicy = DEFAULT_POLICY

    @property
    def lam(self) -> float:
        return self.k.lam

    @property
    def kernel_sign(self) -> SignChoice:
        return kernel_sign(self.branch)

    def table(self) -> np.ndarray:
        return kernel_table(self.grid, self.lam, self.kernel_sign, self.policy, self.rule)


def _potential_on_grid(grid: QuadratureGrid, model: PotentialModel) -> np.ndarray:
    return np.asarray(eval_potential(model, grid.nodes), dtype=float)


def assemble_ls_matrix(grid: QuadratureGrid, model: PotentialModel, k: WaveVector, branch,
                       policy: SeriesPolicy = DEFAULT_POLICY, rule: str = "diagonal") -> np.ndarray:
    """Dense matrix ``A = K diag(V)`` of the discrete equation ``(I + A) phi = phi0``.

    ``A[i, j]`` is the kernel weight for the offset ``x_i - x_j`` (see
    :func:`kernel_weights`) times ``V(x_j)``.
    """
    table = kernel_table(grid, k.lam, kernel_sign(branch), policy, rule)
    a = expand_table(table)
    a *= _potential_on_grid(grid, model)[None, :]
    return a


def apply_green(grid: QuadratureGrid, k: WaveVector, branch, density,
                policy: SeriesPolicy = DEFAULT_POLICY, rule: str = "diagonal") -> np.ndarray:
    """Discrete :math:`G^\\mp` applied to nodal ``density`` (one FFT product).

    ``branch`` names the field, so the kernel sign is its opposite.
    """
    table = kernel_table(grid, k.lam, kernel_sign(branch), policy, rule)
    return ToeplitzOperator(table).apply(density)


def _residual(op: ToeplitzOperator, values, v, phi0) -> float:
    return float(np.max(np.abs(values + op.apply(v * values) - phi0)))


def solve_ls(grid: QuadratureGrid, model: PotentialModel, k: WaveVector, branch,
             method: str = "auto", tol: float = 1e-12, policy: SeriesPolicy = DEFAULT_POLICY,
             rule: str = "diagonal") -> ScatteringField:
    """Solve the discrete Lippmann-Schwinger system for ``phi^branch``.

    Parameters
    ----------
    method : {"auto", "dense", "fft"}
        ``"auto"`` picks the dense LU solve up to 128 x 128 cells and
        FFT-accelerated GMRES beyond.
    tol : float
        Relative residual target for GMRES.
    rule : {"diagonal", "cell_average"}
        Quadrature rule for the kernel, see :func:`kernel_weights`.

    Raises
    ------
    NearSingular
        If the LU condition estimate exceeds ``1e12`` or GMRES stalls.
    """
    branch = SignChoice.parse(branch)
    _check_rule(rule)
    if method == "auto":
        method = "dense" if grid.size <= DENSE_MAX_UNKNOWNS else "fft"
    if method not in ("dense", "fft"):
        raise ValidationError(f"unknown solve method {method!r}")
    phi0 = plane_wave(grid.nodes, k)
    v = _potential_on_grid(grid, model)
    table = kernel_table(grid, k.lam, kernel_sign(branch), policy, rule)
    op = ToeplitzOperator(table)
    cond = None
    iters = None
    if not np.any(v):
        values = phi0.copy()
    elif method == "dense":
        a = expand_table(table)
        a *= v[None, :]
        a[np.diag_indices_from(a)] += 1.0
        anorm = float(np.max(np.sum(np.abs(a), axis=0)))
        lu, piv, info = linalg.lapack.zgetrf(a, overwrite_a=True)
        del a
        if info > 0:
            raise NearSingular("LU factorization hit an exactly zero pivot")
        rcond, _ = linalg.lapack.zgecon(lu, anorm, norm="1")
        cond = math.inf if rcond == 0 else 1.0 / rcond
        if cond > CONDITION_LIMIT:
            raise NearSingular(
                f"condition estimate {cond:.3g} exceeds {CONDITION_LIMIT:.0e}; "
                f"lambda = {k.lam} may sit near a resonance of the truncated system"
            )
        values, info = linalg.lapack.zgetrs(lu, piv, phi0)
        del lu
    else:
        count = [0]

        def matvec(x):
            count[0] += 1
            return x + op.apply(v * x)

        lin = LinearOperator((grid.size, grid.size), matvec=matvec, dtype=complex)
        values, info = gmres(lin, phi0, x0=phi0.copy(), rtol=tol, atol=0.0, restart=60, maxiter=50)
        iters = count[0]
        if info != 0:
            raise NearSingular(f"GMRES did not reach rtol={tol:g} after {iters} products")
    res = _residual(op, values, v, phi0)
    log.debug("solve_ls %s N=%d residual %.3g", method, grid.N, res)
    return ScatteringField(
        grid=grid, k=k, branch=branch, values=values, psi=v * values, residual_norm=res,
        model=model, method=method, rule=rule, condition_estimate=cond, iterations=iters,
        policy=policy,
    )


def _chunk_size(n_nodes: int, budget: int = 2_000_000) -> int:
    return max(1, budget // max(n_nodes, 1))


def scattered_part(field: ScatteringField, x) -> np.ndarray:
    """``-sum_j w_j(x - x_j) psi_j`` at arbitrary points ``x`` of shape ``(m, 2)``.

    The weights are those of the field's quadrature rule evaluated at the
    actual offsets, so a point within ``h/10`` of a node picks up the
    self-cell weight and the result reproduces the nodal values there.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    grid = field.grid
    mask = field.psi != 0
    nodes = grid.nodes[mask]
    psi = field.psi[mask]
    out = np.zeros(len(x), dtype=complex)
    if not len(nodes):
        return out
    step = _chunk_size(len(nodes))
    for start in range(0, len(x), step):
        pts = x[start:start + step]
        dx = pts[:, None, 0] - nodes[None, :, 0]
        dy = pts[:, None, 1] - nodes[None, :, 1]
        w = kernel_weights(grid.h, field.lam, field.kernel_sign, dx, dy, field.rule, field.policy)
        out[start:start + step] = -(w @ psi)
    return out


def evaluate_offgrid(field: ScatteringField, x):
    """Evaluate the solved field anywhere through its integral representation."""
    x_arr = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x_arr)
    vals = plane_wave(pts, field.k) + scattered_part(field, pts)
    if x_arr.ndim == 1:
        return complex(vals[0])
    return vals
