import math

import numpy as np
import pytest
from scipy import integrate

from relscatter.errors import BadResolution
from relscatter.quadrature import (SEC32_INTEGRAL, KernelKind, build_grid, cell_integral, expand_table,
                                   inverse_distance_cell_average, log_distance_cell_average,
                                   offset_table, singular_weight)


def test_grid_basics():
    g = build_grid(1.0, 8)
    assert g.size == 64
    assert g.weights.sum() == pytest.approx(4.0, rel=1e-12)
    g = build_grid(10.0, 64)
    assert g.h == 0.3125
    assert np.allclose(g.node(0, 0), (-9.84375, -9.84375))
    assert np.all(g.weights > 0)


def test_bad_resolution():
    with pytest.raises(BadResolution):
        build_grid(1.0, 6)
    with pytest.raises(BadResolution):
        build_grid(1.0, 9)


def test_inverse_distance_cell_integral():
    assert cell_integral(KernelKind.INVERSE_DISTANCE, 0.5) == pytest.approx(2 * math.log1p(math.sqrt(2)), rel=1e-15)
    # per unit h and with the 1/pi kernel factor: c0 = 4 ln(1 + sqrt 2) / pi
    assert cell_integral("inverse_distance", 0.3) / (math.pi * 0.3) == pytest.approx(1.1222, abs=1e-4)
    brute = integrate.dblquad(lambda y, x: 1.0 / math.hypot(x, y), 0, 0.25, 0, 0.25, epsabs=1e-13)[0] * 4
    assert cell_integral(KernelKind.INVERSE_DISTANCE, 0.5) == pytest.approx(brute, rel=1e-10)


def test_log_and_sqrt_cell_integrals():
    brute = integrate.dblquad(lambda y, x: -math.log(math.hypot(x, y)), 0, 0.25, 0, 0.25, epsabs=1e-13)[0] * 4
    assert cell_integral(KernelKind.LOG_SINGULAR, 0.5) == pytest.approx(brute, rel=1e-10)
    assert cell_integral(KernelKind.LOG_SINGULAR, 0.5) == pytest.approx(0.4385806518606174, rel=1e-14)
    brute = integrate.dblquad(lambda y, x: math.hypot(x, y) ** -0.5, 0, 0.25, 0, 0.25, epsabs=1e-13)[0] * 4
    assert cell_integral(KernelKind.INVERSE_SQRT, 0.5) == pytest.approx(brute, rel=1e-9)
    import mpmath as mp
    assert SEC32_INTEGRAL == pytest.approx(float(mp.quad(lambda t: mp.sec(t) ** 1.5, [0, mp.pi / 4])), rel=1e-15)


def test_singular_weight():
    g = build_grid(2.0, 8)
    assert singular_weight(g, 0, 5, KernelKind.INVERSE_DISTANCE) == g.h ** 2
    assert singular_weight(g, 3, 3, KernelKind.SMOOTH) == g.h ** 2
    assert singular_weight(g, 3, 3, KernelKind.INVERSE_DISTANCE) == cell_integral(KernelKind.INVERSE_DISTANCE, g.h)


def test_corrected_rule_converges():
    exact = 8 * math.log1p(math.sqrt(2))
    errs = []
    for n in (16, 32, 64, 128):
        # odd-centred grid: put a node at the origin by using n+1 cells per side and h = 2/(n+1)
        m = n + 1
        h = 2.0 / m
        ax = -1 + (np.arange(m) + 0.5) * h
        x, y = np.meshgrid(ax, ax, indexing="ij")
        r = np.hypot(x, y)
        r[m // 2, m // 2] = 1.0
        w = h * h / r
        w[m // 2, m // 2] = cell_integral(KernelKind.INVERSE_DISTANCE, h)
        errs.append(abs(w.sum() - exact))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert min(ratios) >= 1.8


def test_cell_averages_match_quadrature():
    h = 0.5
    assert inverse_distance_cell_average(0.0, 0.0, h) == pytest.approx(
        cell_integral(KernelKind.INVERSE_DISTANCE, h) / h ** 2, rel=1e-14)
    assert log_distance_cell_average(0.0, 0.0, h) == pytest.approx(
        -cell_integral(KernelKind.LOG_SINGULAR, h) / h ** 2, rel=1e-14)
    for dx, dy in ((0.5, 0.0), (1.0, -1.5), (3.0, 2.0)):
        f = lambda y, x: 1.0 / math.hypot(dx + x, dy + y)
        ref = integrate.dblquad(f, -h / 2, h / 2, -h / 2, h / 2, epsabs=1e-12)[0] / h ** 2
        assert inverse_distance_cell_average(dx, dy, h) == pytest.approx(ref, rel=1e-8)
        f = lambda y, x: math.log(math.hypot(dx + x, dy + y))
        ref = integrate.dblquad(f, -h / 2, h / 2, -h / 2, h / 2, epsabs=1e-12)[0] / h ** 2
        assert log_distance_cell_average(dx, dy, h) == pytest.approx(ref, rel=1e-8, abs=1e-12)
    # far expansion joins the closed form continuously
    r = 32 * h
    near = inverse_distance_cell_average(r * 0.999, 0.0, h)
    far = inverse_distance_cell_average(r * 1.001, 0.0, h)
    assert abs(near - far) <= 3e-3 * near


def test_offset_table_and_expand():
    g = build_grid(2.0, 8)
    t = offset_table(g, lambda r: 1.0 / r, 7.0)
    a = expand_table(t)
    assert a.shape == (64, 64)
    assert np.allclose(np.diag(a), 7.0)
    i, j = 3 * 8 + 2, 5 * 8 + 7
    r = np.linalg.norm(g.nodes[i] - g.nodes[j])
    assert a[i, j] == pytest.approx(g.h ** 2 / r)
    assert np.array_equal(a, a.T)
