import math

import mpmath as mp
import numpy as np
import pytest

from lagwidom.quadrature import (PanelGrid, gauss_jacobi_left, gauss_legendre,
                                 mp_gauss_jacobi_left, quadratic_breakpoints)


@pytest.mark.parametrize("p", [4, 12, 40])
def test_legendre_exact(p):
    x, w = gauss_legendre(p)
    for k in range(0, 2 * p, 3):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert np.sum(w * x**k) == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("e", [-0.5, 0.5, 1.7])
def test_jacobi_left_moments(e):
    x, w = gauss_jacobi_left(10, e)
    for k in range(6):
        # y = 2u - 1 turns the moment into a finite sum of beta integrals
        exact = 2 ** (e + 1) * sum(math.comb(k, j) * 2**j * (-1) ** (k - j) / (e + j + 1)
                                   for j in range(k + 1))
        assert np.sum(w * x**k) == pytest.approx(exact, rel=1e-12, abs=1e-14)


def test_mp_rule_matches_double():
    xs, ws = mp_gauss_jacobi_left(8, 0.5, 200)
    x, w = gauss_jacobi_left(8, 0.5)
    np.testing.assert_allclose([float(v) for v in xs], x, atol=1e-14)
    np.testing.assert_allclose([float(v) for v in ws], w, atol=1e-14)
    with mp.workprec(200):
        total = mp.fsum(ws)
        assert abs(total - mp.mpf(2) ** 1.5 / mp.mpf(1.5)) < mp.mpf(10) ** -50


def test_panel_grid_integrates_singular():
    g = PanelGrid(10.0, 20, 16)
    x, w = g.rule(1.5)
    # int_0^10 x^1.5 e^-x dx
    exact = float(mp.gammainc(2.5, 0, 10))
    assert np.sum(w * x**1.5 * np.exp(-x)) == pytest.approx(exact, rel=1e-13)
    b = quadratic_breakpoints(10.0, 20)
    assert b[0] == 0 and b[-1] == pytest.approx(10.0) and np.all(np.diff(b) > 0)
    assert g.config() == {"X": 10.0, "panels": 20, "order": 16}
    np.testing.assert_array_equal(g.locate([0.0, b[1], 10.0]), [0, 1, 19])
