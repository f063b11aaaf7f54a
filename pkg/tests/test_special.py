"""In-repo Bessel and Airy functions against scipy (test-only oracle)."""
import mpmath as mp
import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import quad

from lagwidom import _special as sf


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 3.0, 7.25])
def test_bessel_j(nu):
    x = np.concatenate([np.linspace(0, 5, 51), np.linspace(5, 60, 221), [120.0, 400.0]])
    J, dJ = sf.bessel_j(nu, x)
    np.testing.assert_allclose(J, sp.jv(nu, x), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(dJ, sp.jvp(nu, x), rtol=1e-11, atol=1e-13)


def test_bessel_scalar_and_domain():
    J, dJ = sf.bessel_j(1.0, 2.0)
    assert isinstance(J, float)
    assert J == pytest.approx(sp.jv(1, 2.0), rel=1e-14)
    with pytest.raises(ValueError):
        sf.bessel_j(-1.0, 1.0)
    with pytest.raises(ValueError):
        sf.bessel_j(1.0, -1.0)


def test_airy():
    x = np.linspace(-40, 20, 1201)
    A, dA = sf.airy_ai(x)
    ai, aip, _, _ = sp.airy(x)
    np.testing.assert_allclose(A, ai, rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(dA, aip, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("a,b", [(-10.0, 0.0), (0.0, 3.0), (-2.0, 30.0)])
def test_airy_integral(a, b):
    ref = quad(lambda s: sp.airy(s)[0], a, b, limit=200, epsabs=1e-14)[0]
    assert sf.airy_integral(a, b) == pytest.approx(ref, abs=1e-12)
    assert sf.airy_tail_right(0.0) == pytest.approx(1 / 3, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_bessel_alpha_integral(alpha):
    for u in (0.5, 4.0, 25.0):
        with mp.workdps(30):
            ref = float(mp.quad(lambda s: alpha / s * mp.besselj(alpha, s), mp.linspace(0, u, 20)))
        assert sf.bessel_alpha_integral(alpha, u) == pytest.approx(ref, abs=1e-13)
