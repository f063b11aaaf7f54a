import math

import numpy as np
import pytest

from lagwidom import tmtheory as tm


def test_x_matrix_m2():
    X = tm.build_tm(2).X
    # closed forms: (3 - sqrt 3)/4 and 1 - 1/sqrt 3
    np.testing.assert_allclose(X, [[(3 - math.sqrt(3)) / 4, 0.0], [0.0, 1 - 1 / math.sqrt(3)]], atol=1e-13)


@pytest.mark.parametrize("m", [2, 5, 16])
def test_sweep_matches_quad(m):
    a = tm.build_tm(m, method="sweep")
    b = tm.build_tm(m, method="quad")
    np.testing.assert_allclose(a.T_m, b.T_m, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 7, 32])
def test_invertible(m):
    det, cond = tm.verify_tm_invertible(m)
    assert abs(det) > 1e-8 and np.isfinite(cond)


@pytest.mark.parametrize("m", [2, 9, 64])
def test_bounds_and_identities(m):
    assert all(b.ok for b in tm.verify_qhat_bounds(m))
    lhs, rhs = tm.qhat_norm_identity(m)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert tm.aYa_identity(m) == pytest.approx(m / 2, abs=1e-12)


def test_aux_functions():
    assert all(b.ok for b in tm.aux_functions(3))


def test_bound_repr():
    b = tm.Bound("x", 1.0, 2.0)
    assert b.ok and b.slack == 1.0 and "x" in repr(b)
