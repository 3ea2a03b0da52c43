"""Uniform cell-centred quadrature on a square with singular self-cell weights.

The square ``[-L, L]^2`` is cut into ``N x N`` cells of side ``h = 2L/N``.
Node ``(i, j)`` sits at the centre of its cell and has flat index
``i * N + j``; every weight equals ``h^2``.

For kernels singular at zero displacement the weight of the self cell is
replaced by the exact integral of the singular factor over the cell (the
"diagonal replacement").  The cell integrals have closed forms:

===================  =============================================
kind                 :math:`\\int_{[-a,a]^2} f(y)\\,dy`, ``a = h/2``
===================  =============================================
``InverseDistance``  :math:`8a\\,\\ln(1+\\sqrt2)`
``InverseSqrt``      :math:`\\tfrac{16}{3}a^{3/2}\\int_0^{\\pi/4}\\sec^{3/2}\\theta\\,d\\theta`
``LogSingular``      :math:`4a^2\\{\\ln(1/a) - (\\ln 2)/2 - \\pi/4 + 3/2\\}`
``Smooth``           :math:`h^2`
===================  =============================================

``LogSingular`` integrates :math:`\\ln(1/|y|)`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadResolution, ValidationError

LN_1P_SQRT2 = math.log1p(math.sqrt(2.0))
# int_0^{pi/4} sec(t)^{3/2} dt, checked against mpmath in the test suite
SEC32_INTEGRAL = 0.9374897507469362


class KernelKind(str, enum.Enum):
    INVERSE_DISTANCE = "inverse_distance"
    INVERSE_SQRT = "inverse_sqrt"
    LOG_SINGULAR = "log_singular"
    SMOOTH = "smooth"


def cell_integral(kind: KernelKind, h: float) -> float:
    """Exact integral of the singular factor over the centred cell of side ``h``."""
    a = 0.5 * h
    kind = KernelKind(kind)
    if kind is KernelKind.INVERSE_DISTANCE:
        return 8.0 * a * LN_1P_SQRT2
    if kind is KernelKind.INVERSE_SQRT:
        return 16.0 / 3.0 * a**1.5 * SEC32_INTEGRAL
    if kind is KernelKind.LOG_SINGULAR:
        return 4.0 * a * a * (-math.log(a) - 0.5 * math.log(2.0) - 0.25 * math.pi + 1.5)
    return h * h


@dataclass(frozen=True)
class QuadratureGrid:
    half_width: float
    cells_per_side: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    self_correction: float

    @property
    def L(self) -> float:
        return self.half_width

    @property
    def N(self) -> int:
        return self.cells_per_side

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.cells_per_side

    @property
    def size(self) -> int:
        return self.cells_per_side**2

    @property
    def axis(self) -> np.ndarray:
        """Cell-centre coordinates along one side."""
        return -self.half_width + (np.arange(self.cells_per_side) + 0.5) * self.h

    def node(self, i: int, j: int) -> np.ndarray:
        return self.nodes[i * self.cells_per_side + j]

    def as_image(self, values) -> np.ndarray:
        """Reshape a flat nodal array to ``(N, N)`` indexed ``[i, j]``."""
        return np.asarray(values).reshape(self.cells_per_side, self.cells_per_side)

    def sample(self, fn) -> np.ndarray:
        """Evaluate ``fn`` on all nodes (``fn`` takes an ``(n, 2)`` array)."""
        return np.asarray(fn(self.nodes))

    def with_half_width(self, L: float) -> "QuadratureGrid":
        """Grid of the same spacing over a different half width."""
        n = int(round(L / self.half_width * self.cells_per_side))
        n += n % 2
        return build_grid(n * self.h / 2.0, n)


def build_grid(L: float, N: int) -> QuadratureGrid:
    """Uniform cell-centred grid on ``[-L, L]^2`` with ``N`` cells per side.

    Raises
    ------
    BadResolution
        If ``N < 8`` or ``N`` is odd.
    """
    if not (L > 0 and math.isfinite(L)):
        raise ValidationError("half width L must be positive")
    if int(N) != N or N < 8:
        raise BadResolution(f"cells_per_side must be an integer >= 8, got {N}")
    if N % 2:
        raise BadResolution(f"cells_per_side must be even, got {N}")
    N = int(N)
    h = 2.0 * L / N
    ax = -L + (np.arange(N) + 0.5) * h
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    nodes = np.column_stack([xx.ravel(), yy.ravel()])
    weights = np.full(N * N, h * h)
    return QuadratureGrid(float(L), N, nodes, weights, cell_integral(KernelKind.INVERSE_DISTANCE, h))


def singular_weight(grid: QuadratureGrid, i: int, j: int, kernel_kind=KernelKind.SMOOTH) -> float:
    """Quadrature weight for node ``j`` when the kernel is centred on node ``i``."""
    n = grid.size
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError("node index out of range")
    if i != j:
        return grid.h**2
    return cell_integral(KernelKind(kernel_kind), grid.h)


def _corner_primitive(x, y):
    """Odd extension of ``F(X, Y) = int_0^X int_0^Y |y|^-1``, ``X, Y >= 0``."""
    ax, ay = np.abs(x), np.abs(y)
    sx = np.where(ax > 0, ax, 1.0)
    sy = np.where(ay > 0, ay, 1.0)
    f = np.where(ax > 0, ax * np.arcsinh(ay / sx), 0.0) + np.where(ay > 0, ay * np.arcsinh(ax / sy), 0.0)
    return np.sign(x) * np.sign(y) * f


def inverse_distance_cell_average(dx, dy, h: float, exact_radius: float = 32.0):
    """Mean of :math:`1/|x - y|` over the square cell of side ``h`` centred at offset ``(dx, dy)``.

    Within ``exact_radius`` cells the closed form from the corner primitive
    ``X asinh(Y/X) + Y asinh(X/Y)`` is used.  Farther out the two-term
    expansion ``1/r + h^2/(24 r^3)`` (the cell mean of a function ``f`` is
    ``f + h^2 Laplacian(f)/24 + O(h^4)``) avoids the cancellation of the
    closed form; its relative error there is below ``2e-8``.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    shape = np.broadcast(dx, dy).shape
    dx, dy = np.broadcast_to(dx, shape), np.broadcast_to(dy, shape)
    r = np.hypot(dx, dy)
    near = r < exact_radius * h
    out = np.empty(shape)
    if np.any(near):
        out[near] = _cell_mean(_corner_primitive, dx[near], dy[near], h)
    far = ~near
    if np.any(far):
        rf = r[far]
        out[far] = 1.0 / rf + h * h / (24.0 * rf**3)
    return out if out.ndim else float(out)


def _log_corner_primitive(x, y):
    """Odd extension of ``int_0^X int_0^Y ln|y|``, ``X, Y >= 0``."""
    ax, ay = np.abs(x), np.abs(y)
    r2 = ax * ax + ay * ay
    r2s = np.where(r2 > 0, r2, 1.0)
    sx = np.where(ax > 0, ax, 1.0)
    sy = np.where(ay > 0, ay, 1.0)
    f = (ax * ay * (np.log(r2s) - 3.0)
         + np.where(ax > 0, ax * ax * np.arctan(ay / sx), 0.0)
         + np.where(ay > 0, ay * ay * np.arctan(ax / sy), 0.0))
    return 0.5 * np.sign(x) * np.sign(y) * f


def _cell_mean(primitive, dx, dy, h):
    a = 0.5 * h
    return (primitive(dx + a, dy + a) - primitive(dx - a, dy + a)
            - primitive(dx + a, dy - a) + primitive(dx - a, dy - a)) / (h * h)


def log_distance_cell_average(dx, dy, h: float, exact_radius: float = 32.0):
    r"""Mean of :math:`\ln|x - y|` over the cell of side ``h`` centred at offset ``(dx, dy)``.

    Beyond ``exact_radius`` cells the mean equals ``ln r`` up to
    ``O((h/r)^4)`` because the logarithm is harmonic.
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    shape = np.broadcast(dx, dy).shape
    dx, dy = np.broadcast_to(dx, shape), np.broadcast_to(dy, shape)
    r = np.hypot(dx, dy)
    near = r < exact_radius * h
    out = np.empty(shape)
    if np.any(near):
        out[near] = _cell_mean(_log_corner_primitive, dx[near], dy[near], h)
    far = ~near
    if np.any(far):
        out[far] = np.log(r[far])
    return out if out.ndim else float(out)


def offset_table(grid: QuadratureGrid, radial, diagonal) -> np.ndarray:
    """Kernel values on all lattice offsets ``(|di|, |dj|)``.

    ``radial`` maps an array of positive distances to kernel values; the
    zero offset receives ``diagonal``.  The result has shape ``(N, N)`` and
    already includes the weight ``h^2`` off the diagonal.
    """
    n = grid.cells_per_side
    d = np.arange(n) * grid.h
    r = np.hypot(d[:, None], d[None, :])
    r[0, 0] = 1.0
    vals = np.asarray(radial(r.ravel())).reshape(n, n) * grid.h**2
    vals = vals.astype(np.result_type(vals, np.asarray(diagonal)))
    vals[0, 0] = diagonal
    return vals


def expand_table(table: np.ndarray) -> np.ndarray:
    """Dense ``(N^2, N^2)`` matrix ``M[I, J] = table[|i-i'|, |j-j'|]``."""
    n = table.shape[0]
    idx = np.arange(n)
    di = np.abs(idx[:, None] - idx[None, :])
    full = table[di[:, None, :, None], di[None, :, None, :]]
    return full.reshape(n * n, n * n)
