import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from lagwidom import equilibrium as eqm
from lagwidom.tmtheory import hypergeometric_h
from lagwidom.weights import Weight


def test_linear_closed_form():
    for n in (1, 10, 100):
        eq = eqm.equilibrium(Weight(0.0, [0, 2.5]), n)
        assert eq.beta_n == pytest.approx(4 * n / 2.5, rel=1e-14)
        np.testing.assert_allclose(eq.h_coeffs, [4.0], rtol=1e-14)


def test_h_limit_values():
    # m = 2: h = 8/3 + 16x/3  (A_1 = 1/2, A_2 = 3/8)
    np.testing.assert_allclose(eqm.h_limit(2), [8 / 3, 16 / 3], rtol=1e-15)
    x = np.linspace(0, 1, 11)
    for m in (1, 2, 5):
        np.testing.assert_allclose(np.polyval(eqm.h_limit(m)[::-1], x), hypergeometric_h(m, x), rtol=1e-13)


def test_closed_form_primitives():
    h = [1.3, -0.4, 2.0]
    f = lambda s: math.sqrt((1 - s) / s) * np.polyval(h[::-1], s)
    for x in (0.1, 0.5, 0.97):
        assert eqm.density_primitive(h, x) == pytest.approx(quad(f, 0, x)[0], rel=1e-10)
        assert eqm.density_tail(h, x) == pytest.approx(quad(f, x, 1)[0], rel=1e-10)
    g = lambda s: math.sqrt((s - 1) / s) * np.polyval(h[::-1], s)
    assert eqm.exterior_integral(h, 1.7) == pytest.approx(quad(g, 1, 1.7)[0], rel=1e-10)


def test_density_integrates_to_one():
    eq = eqm.equilibrium(Weight(1.0, [0, 0.5, 1.0]), 20)
    assert quad(lambda x: eqm.omega_n(eq, x), 0, 1, limit=200)[0] == pytest.approx(1.0, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.floats(0.1, 3), st.floats(0, 2), st.integers(2, 200))
def test_mrs_property(m, lead, low, n):
    w = Weight(0.5, [0.0, low] + [0.0] * (m - 1) + [lead]) if m > 1 else Weight(0.5, [0.0, lead])
    b = eqm.mrs_number(w, n)
    assert b > 0
    assert abs(eqm.mrs_residual(w, n, b)) < 1e-10
    assert eqm.normalization(eqm.equilibrium(w, n).h_coeffs) == pytest.approx(2 * math.pi, rel=1e-9)


def test_theta_ode():
    x = np.linspace(0.01, 0.99, 50)
    for m in (1, 2, 4):
        assert eqm.check_theta_ode(m, x) < 1e-12
