"""Gauss rules and composite panel grids on ``[0, X]``.

Double-precision nodes come from numpy/scipy.  Extended-precision rules are
obtained by Newton polishing of the double-precision nodes on the Jacobi
three-term recurrence.
"""
from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=64)
def gauss_legendre(p: int):
    x, w = np.polynomial.legendre.leggauss(p)
    return x, w


@lru_cache(maxsize=256)
def gauss_jacobi_left(p: int, e: float):
    """Rule for ``int_{-1}^{1} (1 + y)**e f(y) dy``."""
    if e == 0.0:
        return gauss_legendre(p)
    x, w = roots_jacobi(p, 0.0, e)
    return x, w


def _jacobi_eval(n, a, b, y):
    # P_n^{(a,b)}(y) and its derivative, via the standard recurrence
    p0 = mp.mpf(1)
    if n == 0:
        return p0, mp.mpf(0)
    p1 = (a + 1) + (a + b + 2) * (y - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * y + a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    # derivative from (1 - y^2) P_n' = n[(a - b) - (2n + a + b) y]/(2n + a + b) P_n
    #                                  + 2(n + a)(n + b)/(2n + a + b) P_{n-1}
    c = 2 * n + a + b
    dp = (n * ((a - b) - c * y) / c * p1 + 2 * (n + a) * (n + b) / c * p0) / (1 - y * y)
    return p1, dp


def mp_gauss_jacobi_left(p: int, e, prec: int):
    """Extended-precision rule for weight ``(1 + y)**e`` on ``[-1, 1]``.

    Returns lists of mpf nodes and weights computed at ``prec`` bits.
    """
    with mp.workprec(prec + 20):
        a = mp.mpf(0)
        b = mp.mpf(e)
        y0, _ = gauss_jacobi_left(p, float(e))
        nodes, weights = [], []
        const = (mp.gamma(p + a + 1) * mp.gamma(p + b + 1)
                 / (mp.gamma(p + a + b + 1) * mp.factorial(p)) * mp.mpf(2) ** (a + b + 1))
        for yd in y0:
            y = mp.mpf(float(yd))
            for _ in range(100):
                f, df = _jacobi_eval(p, a, b, y)
                dy = f / df
                y -= dy
                if abs(dy) < mp.mpf(2) ** (-prec - 10):
                    break
            _, df = _jacobi_eval(p, a, b, y)
            nodes.append(y)
            weights.append(const / ((1 - y * y) * df * df))
    return nodes, weights


def quadratic_breakpoints(X: float, panels: int) -> np.ndarray:
    """Breakpoints ``X (j/P)**2``: uniform in ``sqrt(x)``, dense near the hard edge."""
    j = np.arange(panels + 1, dtype=float)
    return X * (j / panels) ** 2


class PanelGrid:
    """Composite rule on ``[0, X]`` for integrands ``x**e * smooth(x)``.

    Panels are uniform in ``sqrt(x)``.  On the first panel a Gauss-Jacobi
    rule absorbs ``x**e``; all other panels use Gauss-Legendre.  The weights
    returned by :meth:`rule` act on plain integrand values.

    Parameters
    ----------
    X : float
        Right end of the integration range.
    panels : int
    order : int
        Nodes per panel.
    """

    def __init__(self, X: float, panels: int, order: int = 24):
        self.X = float(X)
        self.panels = int(panels)
        self.order = int(order)
        self.breaks = quadratic_breakpoints(self.X, self.panels)
        y, wy = gauss_legendre(self.order)
        a = self.breaks[1:-1, None]
        b = self.breaks[2:, None]
        self._rest_x = (0.5 * (b - a) * y + 0.5 * (a + b)).ravel()
        self._rest_w = (0.5 * (b - a) * wy).ravel()
        self._cache = {}

    def rule(self, e: float = 0.0):
        """Nodes and plain-value weights, exact-ish for ``x**e * smooth``."""
        e = float(e)
        if e not in self._cache:
            h = self.breaks[1]
            x0, w0 = first_panel_rule(self.order, e, 0.0, h)
            self._cache[e] = (np.concatenate([x0, self._rest_x]),
                              np.concatenate([w0, self._rest_w]))
        return self._cache[e]

    def locate(self, x):
        """Panel index of each point (``x == X`` falls in the last panel)."""
        j = np.searchsorted(self.breaks, x, side="right") - 1
        return np.clip(j, 0, self.panels - 1)

    def config(self) -> dict:
        return {"X": self.X, "panels": self.panels, "order": self.order}


def first_panel_rule(p: int, e: float, a: float, b: float):
    """Rule on ``[a, b]`` for ``(x - a)**e * smooth``, returning plain-value weights."""
    y, wy = gauss_jacobi_left(p, float(e))
    half = 0.5 * (b - a)
    x = a + half * (1.0 + y)
    if e == 0.0:
        return x, half * wy
    # sum wj (half)^(e+1) g(x_i) with g = f / (x - a)^e
    w = wy * half ** (e + 1.0) / (x - a) ** e
    return x, w


def local_rules(p: int, e: float, a, b):
    """Vectorized rules on many intervals ``[a_i, b_i]`` (``e`` used only where ``a_i == 0``).

    Returns arrays of shape ``(len(a), p)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    y, wy = gauss_legendre(p)
    yj, wj = gauss_jacobi_left(p, float(e))
    half = 0.5 * (b - a)[:, None]
    at0 = (a == 0.0)[:, None]
    yy = np.where(at0, yj, y)
    x = a[:, None] + half * (1.0 + yy)
    with np.errstate(divide="ignore", invalid="ignore"):
        wsing = wj * half ** (e + 1.0) / np.where(x > 0, x, 1.0) ** e
    w = np.where(at0, wsing if e != 0.0 else half * wj, half * wy)
    return x, w
