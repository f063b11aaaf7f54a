import math

import numpy as np
import pytest

from lagwidom import fredholm as fr
from lagwidom import orthopoly as op
from lagwidom.weights import Weight

# Hastings-McLeod solution of Painleve II integrated with DOP853 (rtol 1e-13):
# F2 = exp(-int (x-s) q^2), F1 = exp(-int q / 2) sqrt(F2), F4 = cosh(int q / 2) sqrt(F2)
TW = {
    2: {-3.0: 0.08031955324076945, -2.0: 0.4132241427380086, 0.0: 0.9693728283677123},
    1: {-3.0: 0.06960011912509081, -2.0: 0.2743201980783909, 0.0: 0.8319080662374144},
    4: {-3.0: 0.6118073567513104, -2.0: 0.8903385846786742, 0.0: 0.9985741973587469},
}
# sine-kernel gap on (-s/2, s/2), 60-node Gauss-Legendre with np.sinc
SINE_GAP = {0.5: 0.5150733950728517, 1.0: 0.17021742137918477, 2.0: 0.003497325149168451}


@pytest.fixture(scope="module")
def limit():
    return fr.LimitSource(0.0)


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_tracy_widom(beta, limit):
    for s, ref in TW[beta].items():
        assert fr.largest_eig_cdf(beta, limit, s) == pytest.approx(ref, abs=1e-8)


def test_sine_gap(limit):
    for s, ref in SINE_GAP.items():
        assert fr.bulk_gap(2, limit, s) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("s", [1.0, 4.0, 8.0])
def test_hard_edge_alpha0(s, limit):
    assert 1 - fr.smallest_eig_cdf(2, limit, s) == pytest.approx(math.exp(-s / 4), abs=1e-12)


@pytest.mark.parametrize("graded", [False, True])
def test_sgn_matrix_exact(graded):
    g = fr.NystromGrid(0.0, 3.0, 24, graded=graded)
    E = g.sgn_matrix()
    x = g.nodes
    # sum_j sgn(x_i - x_j) f(x_j) w_j for f = x^2, integrated exactly
    f = x**2
    exact = (x**3 - 0.0) / 3 - (27.0 - x**3) / 3
    np.testing.assert_allclose(E @ f, exact, atol=1e-12)
    assert g.refined().nodes.size == 48


def test_delta_weighting():
    # midpoint of (max(0, (1 - alpha)/2), 1/2)
    assert fr.DeltaWeighting(0.5).delta == pytest.approx(0.375)
    assert fr.DeltaWeighting(2.0).delta == pytest.approx(0.25)
    for alpha, delta in ((0.0, None), (0.5, 0.1)):
        with pytest.raises(ValueError):
            fr.DeltaWeighting(alpha, delta)


@pytest.mark.parametrize("beta", [1, 4])
def test_weighting_is_a_similarity(beta):
    src = fr.LimitSource(1.5)
    plain = fr.gap_probability(beta, src, "hard", (0.0, 3.0), 40)
    conj = fr.gap_probability(beta, src, "hard", (0.0, 3.0), 40, weighting=fr.DeltaWeighting(1.5))
    assert conj == pytest.approx(plain, abs=1e-12)
    assert 0 < fr.smallest_eig_cdf(beta, fr.LimitSource(0.0), 2.0) < 1


def test_det_helpers():
    g = fr.NystromGrid(0.0, 1.0, 10)
    zero = lambda x, y: np.zeros(np.broadcast(x, y).shape)
    assert fr.det_scalar(zero, g) == 1.0
    nan = lambda x, y: np.full(np.broadcast(x, y).shape, np.nan)
    with pytest.raises(fr.SingularEntryError):
        fr.det_scalar(nan, g)
    sign, logdet = fr.det_scalar(lambda x, y: 0.5 + 0 * x * y, g, log=True)
    assert sign == 1.0 and logdet == pytest.approx(math.log(0.5))


def test_finite_exact_law():
    F = fr.FiniteSource(Weight(0.0, [0, 1.0]), 12)
    for xi in (0.5, 3.0):
        x = F.scalings().hard(xi)
        assert fr.smallest_eig_cdf(2, F, xi) == pytest.approx(fr.exact_smallest_cdf_laguerre(12, x), abs=1e-12)


def test_correlation_beta2():
    w = Weight(1.0, [0, 1.0])
    t = op.compute_recurrence(w, 10)
    assert fr.correlation_beta2(t, w, 8, [2.0]) == pytest.approx(op.cd_kernel(t, w, 8, 2.0, 2.0))
    # a repeated point makes the determinant vanish
    assert abs(fr.correlation_beta2(t, w, 8, [2.0, 2.0])) < 1e-12


def test_self_convergence_shape(limit):
    v, e = fr.self_convergence(lambda N: fr.bulk_gap(1, limit, 1.0, N), order=20)
    assert 0 < v < 1 and e < 1e-8
