import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lagwidom.weights import (Weight, eval_V, eval_V_prime, eval_weight, format_poly,
                              from_ensemble, parse_poly)


def test_degree_and_trailing_zeros():
    w = Weight(1.0, [0, 0, 2.0, 0.0])
    assert w.m == 2
    assert w.v_coeffs == (0.0, 0.0, 2.0)


@pytest.mark.parametrize("alpha,coeffs", [(1.0, [1.0]), (1.0, [0, -1.0]), (-0.5, [0, 1.0]),
                                          (float("nan"), [0, 1.0])])
def test_invalid_weights(alpha, coeffs):
    with pytest.raises(ValueError):
        Weight(alpha, coeffs)


def test_from_ensemble():
    assert from_ensemble(0.5, [0, 1.0], 2) == Weight(0.5, [0, 1.0])
    for beta in (1, 4):
        assert from_ensemble(0.5, [0, 1.0, 3.0], beta) == Weight(1.0, [0, 2.0, 6.0])
    with pytest.raises(ValueError):
        from_ensemble(0.5, [0, 1.0], 3)


def test_eval_weight():
    w = Weight(1.5, [0.2, 1.0, 0.5])
    x = np.array([0.0, 0.5, 3.0])
    expect = np.where(x > 0, x**1.5, 0.0) * np.exp(-(0.2 + x + 0.5 * x**2))
    np.testing.assert_allclose(eval_weight(w, x), expect, rtol=1e-15)
    assert eval_weight(Weight(0.0, [0, 1.0]), 0.0) == 1.0
    with pytest.raises(ValueError):
        eval_weight(w, -1.0)


@pytest.mark.parametrize("text,coeffs", [
    ("x", (0.0, 1.0)), ("2x^2", (0.0, 0.0, 2.0)), ("x^2+0.5x", (0.0, 0.5, 1.0)),
    ("1+x^4", (1.0, 0.0, 0.0, 0.0, 1.0)), ("1e-1*x - 2 + x**3", (-2.0, 0.1, 0.0, 1.0))])
def test_parse_poly(text, coeffs):
    assert parse_poly(text) == coeffs


@pytest.mark.parametrize("bad", ["", "x^", "2y", "++x"])
def test_parse_poly_rejects(bad):
    with pytest.raises(ValueError):
        parse_poly(bad)


coeff = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))


@given(st.lists(coeff, min_size=1, max_size=4), st.floats(0.1, 5))
def test_roundtrip_and_derivative(lower, lead):
    w = Weight(0.5, list(lower) + [lead])
    assert Weight.from_json(w.to_json()) == w
    assert parse_poly(format_poly(w.v_coeffs)) == pytest.approx(w.v_coeffs)
    x, h = 0.7, 1e-6
    fd = (eval_V(w, x + h) - eval_V(w, x - h)) / (2 * h)
    assert math.isclose(eval_V_prime(w, x), fd, rel_tol=1e-6, abs_tol=1e-6)
