import math

import numpy as np
import pytest

from relscatter.errors import InsufficientBank, ValidationError
from relscatter.farfield import (build_field_bank, default_radii, far_amplitude, far_amplitude_table,
                                 forward_direction, fourier_oracle, generalized_transform, k_quadrature,
                                 planewave_diff_scan, projector_check, remainder_scan, scan_pair)
from relscatter.potential import PotentialModel, zero_potential
from relscatter.quadrature import build_grid
from relscatter.solver import WaveVector, solve_ls

MODEL = PotentialModel("power", 2.5, 0.3)
K = WaveVector((1.0, 0.0))


@pytest.fixture(scope="module")
def fields(small_grid):
    return {b: solve_ls(small_grid, MODEL, K, b) for b in ("plus", "minus")}


def test_zero_potential_amplitude_and_scans(small_grid):
    f = solve_ls(small_grid, zero_potential(), K, "plus")
    assert far_amplitude(f, (1.0, 0.0)) == 0
    radii = default_radii()
    assert np.all(planewave_diff_scan(f, (0.0, 1.0), radii)[:, 1] == 0)
    assert np.all(remainder_scan(f, (0.0, 1.0), radii)[:, 1] == 0)


def test_amplitude_linear_in_psi(fields):
    import dataclasses
    f = fields["plus"]
    w = np.array([[1.0, 0.0], [0.0, -1.0]])
    a = far_amplitude(f, w)
    g = dataclasses.replace(f, psi=f.psi * (2 - 1j))
    assert np.allclose(far_amplitude(g, w), (2 - 1j) * a, rtol=1e-14)


def test_radial_potential_reflection_symmetry(fields):
    for f in fields.values():
        t = 0.7
        a = far_amplitude(f, (math.cos(t), math.sin(t)))
        b = far_amplitude(f, (math.cos(t), -math.sin(t)))
        assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_born_limit_against_closed_form():
    # Gaussian potential: its Fourier integral is known in closed form
    grid = build_grid(6.0, 48)
    width, eps = 0.8, 1e-3
    model = PotentialModel("gaussian", coupling=eps, width=width)
    for branch, s in (("plus", 1), ("minus", -1)):
        f = solve_ls(grid, model, K, branch)
        for t in (0.0, 1.0, 2.5):
            w = np.array([math.cos(t), math.sin(t)])
            q = s * w + K.array
            ft = 2 * math.pi * width ** 2 * math.exp(-0.5 * width ** 2 * q @ q)
            born = math.sqrt(1 / math.pi) * (1 - 1j * s) * ft
            assert abs(far_amplitude(f, w) / eps - born) <= 0.01 * abs(born)


def test_triangle_inequality(fields):
    f = fields["minus"]
    w = forward_direction(f)
    radii = default_radii()
    d = planewave_diff_scan(f, w, radii)
    r = remainder_scan(f, w, radii)
    amp = abs(far_amplitude(f, w))
    assert np.all(r[:, 1] <= d[:, 1] + amp / np.sqrt(radii) + 1e-15)
    d2, r2 = scan_pair(f, w, radii)
    assert np.array_equal(d2, d) and np.array_equal(r2, r)


def test_scan_validation(fields):
    f = fields["plus"]
    with pytest.raises(ValidationError):
        planewave_diff_scan(f, (1.0, 0.0), [0.5, 2.0])
    with pytest.raises(ValidationError):
        planewave_diff_scan(f, (1.0, 0.0), [5.0, 2.0])
    with pytest.raises(ValidationError):
        far_amplitude(f, (1.0, 1.0))


def test_forward_direction(fields):
    assert np.allclose(forward_direction(fields["minus"]), K.omega_k)
    assert np.allclose(forward_direction(fields["plus"]), -K.omega_k)


def test_amplitude_table(fields):
    tab = far_amplitude_table(fields["plus"], 16)
    assert tab.values.shape == (16,)
    assert np.allclose(np.hypot(*tab.directions.T), 1.0)


def test_k_quadrature_area():
    _, _, pts, w = k_quadrature(0.5, 2.0, 16, 32)
    assert w.sum() == pytest.approx(math.pi * (4 - 0.25), rel=1e-12)
    assert np.all((np.hypot(*pts.T) > 0.5) & (np.hypot(*pts.T) < 2.0))


@pytest.fixture(scope="module")
def free_bank():
    grid = build_grid(8.0, 32)
    return build_field_bank(grid, zero_potential(), "plus", 0.5, 2.0, 16, 32)


def test_transform_free_equals_fourier(free_bank):
    grid = free_bank.grid
    u = np.exp(-0.5 * np.sum(grid.nodes ** 2, axis=1))
    ft = generalized_transform(free_bank, u)
    ref = fourier_oracle(grid, u, free_bank.k_points)
    assert np.max(np.abs(ft - ref)) <= 1e-3 * np.max(np.abs(ref))
    # and the oracle itself matches the continuum transform of the Gaussian
    k2 = np.sum(free_bank.k_points ** 2, axis=1)
    assert np.allclose(ref, np.exp(-0.5 * k2), atol=1e-6)


def test_transform_linear(free_bank):
    rng = np.random.default_rng(5)
    u, v = rng.normal(size=(2, free_bank.grid.size))
    lhs = generalized_transform(free_bank, 2.5 * u + v)
    rhs = 2.5 * generalized_transform(free_bank, u) + generalized_transform(free_bank, v)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)


def test_projector_check_runs(free_bank):
    u = np.exp(-0.5 * np.sum(free_bank.grid.nodes ** 2, axis=1))
    d = projector_check(free_bank, u, 0.5, 2.0)
    assert 0 <= d < 0.2
    with pytest.raises(ValidationError):
        projector_check(free_bank, u, 0.4, 2.0)


def test_insufficient_bank():
    grid = build_grid(4.0, 16)
    bank = build_field_bank(grid, zero_potential(), "plus", 0.5, 2.0, 4, 8)
    with pytest.raises(InsufficientBank):
        generalized_transform(bank, np.ones(grid.size))
