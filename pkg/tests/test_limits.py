import numpy as np
import pytest
from scipy import special as sp

from lagwidom import limits as L
from lagwidom.equilibrium import equilibrium
from lagwidom.weights import Weight


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.5])
def test_bessel_kernel(alpha):
    x, y = np.array([0.5, 2.0, 9.0]), np.array([1.5, 2.0, 4.0])
    sx, sy = np.sqrt(x), np.sqrt(y)
    off = (sp.jv(alpha, sx) * sy * sp.jvp(alpha, sy) - sx * sp.jvp(alpha, sx) * sp.jv(alpha, sy)) / (2 * (x - y))
    diag = 0.25 * (sp.jv(alpha, sx) ** 2 - sp.jv(alpha + 1, sx) * sp.jv(alpha - 1, sx))
    ref = np.where(x == y, diag, off)  # off is nan on the diagonal
    np.testing.assert_allclose(L.kernel_bessel(alpha, x, y), ref, rtol=1e-10, atol=1e-14)


def test_airy_and_sine():
    x, y = np.array([-3.0, 0.0, 1.2]), np.array([-1.0, 0.0, 2.0])
    ai = lambda v: sp.airy(v)[0]
    aip = lambda v: sp.airy(v)[1]
    off = (ai(x) * aip(y) - aip(x) * ai(y)) / np.where(x == y, 1, x - y)
    diag = aip(x) ** 2 - x * ai(x) ** 2
    np.testing.assert_allclose(L.kernel_airy(x, y), np.where(x == y, diag, off), rtol=1e-10, atol=1e-14)
    t = np.array([0.0, 0.3, 2.0])
    np.testing.assert_allclose(L.kernel_sine(t), np.sinc(t), rtol=1e-14)


def test_scalings_linear():
    n = 20
    eq = equilibrium(Weight(1.0, [0, 1.0]), n)
    sc = L.scalings(eq, 0.5)
    assert sc.hard(1.0) == pytest.approx(1 / (4 * n), rel=1e-14)
    assert sc.factor("bulk", 4) == pytest.approx(sc.factor("bulk", 2) / 2)
    with pytest.raises(ValueError):
        sc.factor("edge")
    assert L.scalings(eq).q_n_sq is None


@pytest.mark.parametrize("regime", ["hard", "soft", "bulk"])
@pytest.mark.parametrize("beta", [1, 2, 4])
def test_lattice_error_of_limit_is_zero(regime, beta):
    if beta == 2:
        fin = lambda s, t: L.limit_scalar_kernel(regime, s, t, 1.5)
    else:
        fin = lambda s, t: L.limit_matrix_kernel(regime, beta, s, t, 1.5)
    assert np.max(L.lattice_error(regime, beta, 1.5, fin)) == 0.0


def test_matrix_limit_shapes():
    K = L.limit_matrix_kernel("soft", 1, np.zeros(3), np.ones(3))
    assert K.shape == (3, 2, 2)
    # 21 entries are skew: eps S and the jump -sgn/2 both are
    for regime in ("hard", "soft", "bulk"):
        for beta in (1, 4):
            up = L.limit_matrix_kernel(regime, beta, 0.7, 1.9, 1.5)[1, 0]
            down = L.limit_matrix_kernel(regime, beta, 1.9, 0.7, 1.5)[1, 0]
            assert up == pytest.approx(-down, abs=1e-12)


def test_error_weights_hard():
    W = L.error_weights("hard", 4, 2.0, 4.0, 9.0)
    s = 4.0 * 9.0
    np.testing.assert_allclose(W, [[s / 4, s / 36], [s, s / 9]])
    with pytest.raises(ValueError):
        L.error_weights("hard", 3, 1.0, 1.0, 1.0)
