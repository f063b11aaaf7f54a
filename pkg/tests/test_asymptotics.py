import math

import numpy as np
import pytest

from lagwidom import asymptotics as asy
from lagwidom.equilibrium import equilibrium
from lagwidom.weights import Weight


def test_regions():
    cfg = asy.RegionConfig(64)
    d = 64 ** (1 / 12 - 2 / 3)
    assert cfg.boundaries == pytest.approx((0.0, 1 / 64, 1 - d, 1 + d, math.inf))
    assert asy.region_of(64, 1 / 64) == "bessel"
    assert asy.region_of(64, 0.5) == "bulk"
    assert asy.region_of(64, 1.0) == "airy"
    assert asy.region_of(64, 2.0) == "exponential"
    lo, hi = cfg.interior("exponential")
    assert 1 + d < lo < hi < 1 + 4 * d
    with pytest.raises(ValueError):
        asy.region_of(64, 0.0)


def test_region_guard():
    w = Weight(1.0, [0, 1.0])
    eq = equilibrium(w, 32)
    with pytest.raises(asy.RegionError):
        asy.phi_hat_leading("bessel", w, eq, 32, 0.5)
    with pytest.raises(ValueError):
        asy.phi_hat_leading("edge", w, eq, 32, 0.5)


def test_maps_continuous_at_soft_edge():
    eq = equilibrium(Weight(2.0, [0, 0.5, 1.0]), 40)
    ft, fn = asy.f_maps(eq, np.array([0.3, 1.0 - 1e-9, 1.0 + 1e-9, 1.5]))
    assert np.isnan(ft[-1])
    assert fn[0] < 0 < fn[-1]
    assert abs(fn[1]) < 1e-4 and abs(fn[2]) < 1e-4
    # -f~ grows like n^2 x near the hard edge
    x = 1e-6
    assert -asy.f_tilde(eq, x) == pytest.approx((40 / 4 * 2 * math.sqrt(x) * eq.h(0.0)) ** 2, rel=1e-3)


def test_leading_order_small_error():
    w = Weight(1.0, [0, 1.0])
    rows = asy.comparison_table(w, [64], points=11)
    worst = max(r[6] for r in rows)
    assert worst < 0.05
