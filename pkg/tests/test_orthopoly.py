import numpy as np
import pytest
from scipy.special import eval_genlaguerre, gammaln

from lagwidom import orthopoly as op
from lagwidom.weights import Weight

# x^alpha e^{-x^2}: Chebyshev algorithm on the exact moments Gamma((k+alpha+1)/2)/2,
# run in 60-digit arithmetic
HALF_GAUSS = {
    0.5: ([0.7396687797971597, 1.0831623826765335, 1.3546305329523973,
           1.5814448780630592, 1.7797202636300298, 1.958044831443959],
          [0.4504332316707781, 0.6114484087485335, 0.7355997299020643,
           0.8413828706457754, 0.9352382841867263, 1.0204850757591053]),
    2.0: ([1.1283791670955126, 1.3596630397735372, 1.5705068596616252,
           1.7618965662237742, 1.9370615696730713, 2.0990006812228112],
          [0.47619371611229533, 0.6515795906939896, 0.78035392018419,
           0.8869995767654234, 0.9803184309772295, 1.0645054786672152]),
}


@pytest.fixture(scope="module")
def laguerre():
    w = Weight(1.5, [0, 1.0])
    return w, op.compute_recurrence(w, 30)


@pytest.mark.parametrize("alpha", sorted(HALF_GAUSS))
def test_half_gaussian_recurrence(alpha):
    t = op.compute_recurrence(Weight(alpha, [0, 0, 1.0]), 8)
    a, b = HALF_GAUSS[alpha]
    np.testing.assert_allclose(t.a[:6], a, rtol=1e-13)
    np.testing.assert_allclose(t.b[:6], b, rtol=1e-13)


def test_phi_against_laguerre(laguerre):
    w, t = laguerre
    x = np.array([0.1, 1.0, 7.5, 30.0])
    for k in (0, 3, 17):
        norm = np.exp(0.5 * (gammaln(k + 1) - gammaln(k + w.alpha + 1)))
        ref = (-1) ** k * norm * eval_genlaguerre(k, w.alpha, x) * x ** (w.alpha / 2) * np.exp(-x / 2)
        np.testing.assert_allclose(op.eval_phi(t, w, k, x), ref, rtol=1e-11, atol=1e-14)


def test_leading_and_zero_values(laguerre):
    w, t = laguerre
    k = np.arange(10)
    # p_k(0) of the orthonormal Laguerre polynomials
    expect = (-1.0) ** k * np.exp(0.5 * (gammaln(k + w.alpha + 1) - gammaln(k + 1)) - gammaln(w.alpha + 1))
    np.testing.assert_allclose(t.p_at_zero[:10], expect, rtol=1e-12)


def test_gram_and_cd(laguerre):
    w, t = laguerre
    G = op.gram_matrix(t, w, 20)
    np.testing.assert_allclose(G, np.eye(21), atol=1e-12)
    x, y = np.array([0.3, 2.0, 9.0]), np.array([1.1, 4.0, 8.5])
    np.testing.assert_allclose(op.cd_kernel(t, w, 12, x, y), op.cd_kernel_ratio(t, w, 12, x, y),
                               rtol=1e-10)


def test_derivative_fd(laguerre):
    w, t = laguerre
    x, h = np.array([0.5, 3.0, 12.0]), 1e-5
    fd = (op.eval_phi(t, w, 9, x + h) - op.eval_phi(t, w, 9, x - h)) / (2 * h)
    np.testing.assert_allclose(op.eval_phi_deriv(t, w, 9, x), fd, rtol=1e-7, atol=1e-9)


def test_json_roundtrip_and_bounds(laguerre):
    w, t = laguerre
    u = op.RecurrenceTable.from_json(t.to_json())
    np.testing.assert_array_equal(u.a, t.a)
    np.testing.assert_array_equal(u.b, t.b)
    with pytest.raises(IndexError):
        op.eval_phi(t, w, 31, 1.0)
    with pytest.raises(IndexError):
        op.cd_kernel(t, w, 0, 1.0, 1.0)


def test_cauchy_at_zero(laguerre):
    w, t = laguerre
    # int p_0 w / y = p_0 Gamma(alpha)
    p0 = 1 / np.sqrt(np.exp(gammaln(w.alpha + 1)))
    assert op.cauchy_at_zero(t, w, 0) == pytest.approx(p0 * np.exp(gammaln(w.alpha)), rel=1e-12)
    with pytest.raises(ValueError):
        op.cauchy_at_zero(t, Weight(0.0, [0, 1.0]), 0)


def test_precision_env(monkeypatch):
    monkeypatch.setenv("RMT_PRECISION_BITS", "128")
    assert op.default_bits() == 128
    monkeypatch.setenv("RMT_PRECISION_BITS", "32")
    with pytest.raises(ValueError):
        op.default_bits()
