import numpy as np
import pytest
from scipy.integrate import quad

from lagwidom import orthopoly as op
from lagwidom.widom import IDENTITY_LIMITS, build, conjugate, identity_residuals
from lagwidom.weights import Weight


@pytest.fixture(scope="module", params=[(1.0, (0, 1.0), 12), (2.0, (0, 0, 1.0), 10)])
def system(request):
    alpha, v, n = request.param
    w = Weight(alpha, v)
    return build(w, n, t=op.compute_recurrence(w, n + w.m + 2))


def test_identities(system):
    res = identity_residuals(system)
    assert all(res[k] <= IDENTITY_LIMITS[k] for k in res), res


def test_needs_positive_alpha():
    with pytest.raises(ValueError):
        build(Weight(0.0, [0, 1.0]), 8)


def test_two_forms_of_s1(system):
    b = system.eq.beta_n
    x = b * np.array([0.05, 0.3, 0.7, 1.1])
    y = b * np.array([0.2, 0.5, 0.9, 0.4])
    np.testing.assert_allclose(system.S1(x, y), system.S1_widom(x, y), rtol=1e-9, atol=1e-12)


def test_one_point_densities(system):
    n, b = system.n, system.eq.beta_n
    top = 2.5 * b
    f1 = lambda x: float(system.S1(x, x))
    f4 = lambda x: 0.5 * float(system.S4(x, x))
    pts = list(b * np.linspace(0.05, 1, 8))
    assert quad(f1, 0, top, points=pts, limit=400)[0] == pytest.approx(n, rel=1e-8)
    assert quad(f4, 0, top, points=pts, limit=400)[0] == pytest.approx(n / 2, rel=1e-8)


def test_derivatives_fd(system):
    b = system.eq.beta_n
    x, y, h = 0.4 * b, 0.6 * b, 1e-5 * b
    fd1 = (system.S1(x, y + h) - system.S1(x, y - h)) / (2 * h)
    fd4 = (system.S4(x, y + h) - system.S4(x, y - h)) / (2 * h)
    assert float(system.dS1_dy(x, y)) == pytest.approx(float(fd1), rel=1e-6, abs=1e-9)
    assert float(system.dS4_dy(x, y)) == pytest.approx(float(fd4), rel=1e-6, abs=1e-9)


def test_eps_s1_skew(system):
    b = system.eq.beta_n
    x = b * np.array([0.1, 0.5, 0.9])
    y = b * np.array([0.7, 0.2, 1.3])
    np.testing.assert_allclose(system.epsS1(x, y), -system.epsS1(y, x), atol=1e-10)
    np.testing.assert_allclose(system.epsS1(x, x), 0.0, atol=1e-10)


def test_matrix_kernel_and_conjugate(system):
    b = system.eq.beta_n
    K = system.matrix_kernel(4, 0.3 * b, 0.8 * b)
    assert K.shape == (2, 2)
    C = conjugate(K, 2.0)
    assert C[0, 0] == K[0, 0] and C[1, 1] == K[1, 1]
    assert C[0, 1] * C[1, 0] == pytest.approx(K[0, 1] * K[1, 0])
    with pytest.raises(ValueError):
        system.matrix_kernel(2, 1.0, 1.0)
