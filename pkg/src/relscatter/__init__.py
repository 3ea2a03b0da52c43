"""Generalized eigenfunctions of the 2D relativistic Schrodinger operator.

The package solves the Lippmann-Schwinger equation for
:math:`H = \\sqrt{-\\Delta} + V` on the plane with the explicit
Struve/Neumann/Bessel form of the free resolvent kernel, and measures the
decay rates of the solutions and of the kernel.

Modules: :mod:`~relscatter.specfun` (J0, N0, H0), :mod:`~relscatter.kernel`
(resolvent kernels), :mod:`~relscatter.potential`,
:mod:`~relscatter.quadrature`, :mod:`~relscatter.solver`,
:mod:`~relscatter.farfield`, :mod:`~relscatter.verify`,
:mod:`~relscatter.acceptance` and :mod:`~relscatter.cli`.
"""
__version__ = "0.1.0"

from .errors import (BadResolution, BranchCut, DomainError, InsufficientBank, NearSingular,
                     NonConvergent, NumericalError, RelScatterError, SingularPoint, ValidationError)
from .farfield import far_amplitude, remainder_scan
from .kernel import SignChoice, g_boundary, g_resolvent, m_boundary, poisson_laplace_oracle
from .potential import PotentialKind, PotentialModel, eval_potential, zero_potential
from .quadrature import QuadratureGrid, build_grid
from .solver import ScatteringField, WaveVector, evaluate_offgrid, plane_wave, solve_ls
from .specfun import SeriesPolicy, bessel_j0, neumann_n0, struve_h0

__all__ = [
    "BadResolution", "BranchCut", "DomainError", "InsufficientBank", "NearSingular",
    "NonConvergent", "NumericalError", "RelScatterError", "SingularPoint", "ValidationError",
    "far_amplitude", "remainder_scan",
    "SignChoice", "g_boundary", "g_resolvent", "m_boundary", "poisson_laplace_oracle",
    "PotentialKind", "PotentialModel", "eval_potential", "zero_potential",
    "QuadratureGrid", "build_grid", "ScatteringField", "WaveVector", "evaluate_offgrid",
    "plane_wave", "solve_ls", "SeriesPolicy", "bessel_j0", "neumann_n0", "struve_h0",
]
