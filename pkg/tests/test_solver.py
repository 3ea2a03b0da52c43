import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relscatter.errors import NearSingular, ValidationError
from relscatter.kernel import SignChoice
from relscatter.potential import PotentialModel, eval_potential, zero_potential
from relscatter.quadrature import build_grid
from relscatter.solver import (ToeplitzOperator, WaveVector, apply_green, assemble_ls_matrix, diagonal_weight,
                               evaluate_offgrid, kernel_sign, kernel_table, kernel_weights, plane_wave,
                               scattered_part, solve_ls)

MODEL = PotentialModel("power", 2.5, 0.3)
K = WaveVector((1.0, 0.0))


def test_wave_vector():
    k = WaveVector((3.0, 4.0))
    assert k.lam == 5.0
    assert np.dot(k.omega_k, k.omega_k) == pytest.approx(1.0, abs=1e-15)
    assert (-k).k == (-3.0, -4.0)
    with pytest.raises(ValidationError):
        WaveVector((0.0, 0.0))


def test_plane_wave():
    assert plane_wave(np.zeros(2), K) == 1.0
    assert plane_wave(np.array([math.pi, 0.0]), K) == pytest.approx(-1.0)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(100, 2)) * 10
    for kk in rng.normal(size=(5, 2)):
        assert np.allclose(np.abs(plane_wave(x, WaveVector(kk))), 1.0, atol=1e-15)


def test_branch_pairing():
    assert kernel_sign("plus") is SignChoice.MINUS
    assert kernel_sign(SignChoice.MINUS) is SignChoice.PLUS


def _brute_self_cell(h, lam, sign):
    from scipy import integrate
    from relscatter.kernel import boundary_kernel_radial
    f = lambda y, x, part: getattr(boundary_kernel_radial(lam, max(math.hypot(x, y), 1e-300), sign), part)
    re = 4 * integrate.dblquad(f, 0, h / 2, 0, h / 2, args=("real",), epsabs=1e-13)[0]
    im = 4 * integrate.dblquad(f, 0, h / 2, 0, h / 2, args=("imag",), epsabs=1e-13)[0]
    return complex(re, im)


def test_diagonal_weight_against_brute_force():
    # The midpoint treatment of the smooth remainder drops the linear Struve
    # term -lam^2 r / pi, so the self-cell error is O(h^3) against an O(h) weight.
    lam = 1.0
    errs = []
    for h in (0.5, 0.25):
        for sign in ("plus", "minus"):
            d = diagonal_weight(h, lam, sign)
            ref = _brute_self_cell(h, lam, sign)
            assert abs(d - ref) <= 0.03 * abs(d)
        errs.append(abs(diagonal_weight(h, lam, "plus") - _brute_self_cell(h, lam, "plus")))
    assert errs[0] / errs[1] >= 7.0


def test_zero_potential_gives_plane_wave(small_grid):
    for branch in ("plus", "minus"):
        f = solve_ls(small_grid, zero_potential(), K, branch)
        assert np.max(np.abs(f.values - plane_wave(small_grid.nodes, K))) <= 1e-13
        assert f.residual_norm <= 1e-13
        pts = np.array([[0.3, 0.1], [30.0, -2.0]])
        assert np.allclose(evaluate_offgrid(f, pts), plane_wave(pts, K), atol=1e-15)
    assert not np.any(assemble_ls_matrix(small_grid, zero_potential(), K, "plus"))


def test_matrix_linear_in_coupling(small_grid):
    a1 = assemble_ls_matrix(small_grid, MODEL, K, "plus")
    a2 = assemble_ls_matrix(small_grid, MODEL.scaled(2.0), K, "plus")
    assert np.allclose(a2, 2 * a1, rtol=1e-15, atol=0)


def test_matrix_rotation_permutation():
    g = build_grid(2.0, 8)
    a = assemble_ls_matrix(g, MODEL, K, "plus")
    n = g.N
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    perm = ((n - 1 - j) * n + i).ravel()
    assert np.allclose(a[np.ix_(perm, perm)], a, rtol=1e-13, atol=1e-15)


def test_fft_operator_matches_dense(small_grid):
    table = kernel_table(small_grid, 1.0, "minus")
    op = ToeplitzOperator(table)
    from relscatter.quadrature import expand_table
    u = np.random.default_rng(3).normal(size=small_grid.size) + 0j
    assert np.allclose(op.apply(u), expand_table(table) @ u, rtol=1e-12, atol=1e-12)


def test_dense_and_fft_agree(small_grid):
    fd = solve_ls(small_grid, MODEL, K, "plus", method="dense")
    ff = solve_ls(small_grid, MODEL, K, "plus", method="fft")
    assert fd.residual_norm <= 1e-10 and ff.residual_norm <= 1e-10
    assert fd.condition_estimate is not None and fd.condition_estimate < 1e12
    assert np.max(np.abs(fd.values - ff.values)) <= 1e-10
    assert np.array_equal(fd.psi, eval_potential(MODEL, small_grid.nodes) * fd.values)


def test_offgrid_reproduces_nodal_values(small_grid):
    f = solve_ls(small_grid, MODEL, K, "minus")
    idx = [0, 37, 300, small_grid.size - 1]
    assert np.max(np.abs(evaluate_offgrid(f, small_grid.nodes[idx]) - f.values[idx])) <= 1e-10
    # within h/10 of a node the self-cell weight is used
    x = small_grid.nodes[37] + 0.01 * small_grid.h
    assert abs(evaluate_offgrid(f, x) - f.values[37]) <= 0.1


def test_offgrid_cell_average_rule(small_grid):
    f = solve_ls(small_grid, MODEL, K, "plus", rule="cell_average")
    idx = [5, 250]
    assert np.max(np.abs(evaluate_offgrid(f, small_grid.nodes[idx]) - f.values[idx])) <= 1e-10


def test_born_scaling(small_grid):
    phi0 = plane_wave(small_grid.nodes, K)
    unit = MODEL.scaled(1 / MODEL.coupling)
    gv = apply_green(small_grid, K, "plus", eval_potential(unit, small_grid.nodes) * phi0)
    eps = np.array([1e-3, 3e-3, 1e-2])
    errs = [np.max(np.abs(solve_ls(small_grid, unit.scaled(e), K, "plus").values - phi0 + e * gv)) for e in eps]
    assert np.polyfit(np.log(eps), np.log(errs), 1)[0] == pytest.approx(2.0, abs=0.2)


def test_rotation_symmetry(small_grid):
    f1 = solve_ls(small_grid, MODEL, K, "minus")
    f2 = solve_ls(small_grid, MODEL, WaveVector((0.0, 1.0)), "minus")
    n = small_grid.N
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    assert np.max(np.abs(f2.values[((n - 1 - j) * n + i).ravel()] - f1.values[(i * n + j).ravel()])) <= 1e-8


def test_conjugation_duality(small_grid):
    k = WaveVector((0.6, -0.8))
    fp = solve_ls(small_grid, MODEL, k, "plus")
    fm = solve_ls(small_grid, MODEL, -k, "minus")
    assert np.max(np.abs(np.conj(fp.values) - fm.values)) <= 1e-12
    from relscatter.farfield import far_amplitude
    w = np.array([0.0, 1.0])
    # conj f^+(w, k) = f^-(w, -k) up to the shared prefactor convention
    assert abs(np.conj(far_amplitude(fp, w)) - far_amplitude(fm, w)) <= 1e-12


def test_scattered_part_is_linear(small_grid):
    f = solve_ls(small_grid, MODEL, K, "plus")
    pts = np.array([[15.0, 3.0], [-40.0, 7.0]])
    base = scattered_part(f, pts)
    import dataclasses
    doubled = dataclasses.replace(f, psi=2 * f.psi)
    assert np.allclose(scattered_part(doubled, pts), 2 * base, rtol=1e-14)


def test_near_singular_is_reported(small_grid, monkeypatch):
    import relscatter.solver as solver
    monkeypatch.setattr(solver, "CONDITION_LIMIT", 1.0)
    with pytest.raises(NearSingular, match="condition estimate"):
        solve_ls(small_grid, MODEL, K, "plus", method="dense")


def test_unknown_method_and_rule(small_grid):
    with pytest.raises(ValidationError):
        solve_ls(small_grid, MODEL, K, "plus", method="cg")
    with pytest.raises(ValidationError):
        solve_ls(small_grid, MODEL, K, "plus", rule="trapezoid")


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
def test_kernel_weights_conjugate_symmetry(lam, dx, dy):
    wp = kernel_weights(0.5, lam, "plus", np.array([dx]), np.array([dy]))
    wm = kernel_weights(0.5, lam, "minus", np.array([dx]), np.array([dy]))
    assert np.allclose(wp, np.conj(wm), rtol=1e-15, atol=0)
