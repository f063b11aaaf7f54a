"""Equilibrium quantities of a Laguerre-type weight.

Everything here lives in the rescaled variable ``x / beta_n``, so the
equilibrium density is supported on ``[0, 1]`` with a hard edge at 0 and a
soft edge at 1:

    omega_n(x) = sqrt((1 - x) / x) * h_n(x) / (2 pi).

The polynomial ``h_n`` has a closed form in terms of ``beta_n`` and the
coefficients of ``V``.  Integrals of ``sqrt((1-s)/s) s**k`` are done in closed
form through ``s = sin(t/2)**2``, which turns the integrand into a cosine
polynomial in ``t``; outside ``[0, 1]`` the hyperbolic analogue is used.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P
from scipy import integrate

from .weights import Weight


def central_binomial_ratio(j: int) -> float:
    """``A_j = binom(2j, j) / 4**j = prod_{i<=j} (2i-1)/(2i)``."""
    a = 1.0
    for i in range(1, j + 1):
        a *= (2 * i - 1) / (2 * i)
    return a


def _mrs_lhs(q, beta):
    g = 0.0
    dg = 0.0
    for j in range(1, len(q)):
        t = j * q[j] * central_binomial_ratio(j)
        g += t * beta**j
        dg += j * t * beta ** (j - 1)
    return g, dg


class NoRootError(ValueError):
    pass


def mrs_number(w: Weight, n: float) -> float:
    """Mhaskar-Rakhmanov-Saff number ``beta_n``.

    Solves ``sum_j j q_j A_j beta**j = 2 n`` by Newton's method safeguarded
    with bisection on a bracket.

    Raises
    ------
    NoRootError
        If the left side crosses ``2n`` more than once on the bracket or is
        not increasing at the crossing, so that the root is not unique.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    q = w.v_coeffs
    m = w.m
    target = 2.0 * n
    lead = m * q[m] * central_binomial_ratio(m)
    hi = (target / lead) ** (1.0 / m)
    while _mrs_lhs(q, hi)[0] < target:
        hi *= 2.0
    lo = 0.0
    grid = np.linspace(0.0, hi, 1025)[1:]
    sgn = np.sign([_mrs_lhs(q, b)[0] - target for b in grid])
    if np.count_nonzero(np.diff(sgn)) > 1:
        raise NoRootError("MRS equation has several roots on the bracket")
    x = hi
    for _ in range(200):
        g, dg = _mrs_lhs(q, x)
        if g > target:
            hi = x
        else:
            lo = x
        step = (g - target) / dg
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4e-16 * abs(x):
            x = xn
            break
        x = xn
    if _mrs_lhs(q, x)[1] <= 0:
        raise NoRootError("MRS equation is not increasing at the root")
    return float(x)


def mrs_residual(w: Weight, n: float, beta: float) -> float:
    """Relative residual of ``(1/2pi) int_0^beta V'(x) sqrt(x/(beta-x)) dx = n``.

    Independent check of :func:`mrs_number` by adaptive quadrature with the
    algebraic endpoint weights handled by QUADPACK.
    """
    q = w.v_coeffs

    def f(x):
        return sum(j * q[j] * x ** (j - 1) for j in range(1, len(q)))

    val, _ = integrate.quad(f, 0.0, beta, weight="alg", wvar=(0.5, -0.5),
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return abs(val / (2 * math.pi) - n) / n


def h_coefficients(w: Weight, n: float, beta_n: float) -> np.ndarray:
    """Coefficients of ``h_n`` (ascending degree, length ``m``)."""
    q = w.v_coeffs
    m = w.m
    h = np.zeros(m)
    for k in range(m):
        h[k] = sum(j * q[j] * beta_n**j * central_binomial_ratio(j - 1 - k)
                   for j in range(k + 1, m + 1)) / n
    return h


def _moment(k: int) -> float:
    # int_0^1 sqrt((1-s)/s) s^k ds = B(k + 1/2, 3/2)
    return math.exp(math.lgamma(k + 0.5) + math.lgamma(1.5) - math.lgamma(k + 2))


def normalization(h) -> float:
    """``int_0^1 sqrt((1-s)/s) h(s) ds`` for a coefficient vector ``h``."""
    return float(sum(c * _moment(k) for k, c in enumerate(h)))


class ValidationError(ValueError):
    pass


def h_polynomial(w: Weight, n: float, beta_n: float) -> np.ndarray:
    """``h_n`` coefficients, validated against the ``2 pi`` normalization."""
    h = h_coefficients(w, n, beta_n)
    rel = abs(normalization(h) / (2 * math.pi) - 1.0)
    if rel > 1e-8:
        raise ValidationError(f"h_n normalization off by {rel:.3e}")
    return h


def h_limit(m: int) -> np.ndarray:
    """Large-n limit of ``h_n``: coefficients ``2 A_{m-1-k} / A_m``."""
    am = central_binomial_ratio(m)
    return np.array([2 * central_binomial_ratio(m - 1 - k) / am for k in range(m)])


# -- closed-form primitives ---------------------------------------------------

def _cos_series(k: int) -> np.ndarray:
    # ((1-u)/2)^k (1+u)/2 as a Chebyshev series in u = cos t
    p = P.polymul(P.polypow([0.5, -0.5], k), [0.5, 0.5])
    return C.poly2cheb(p)


def _cosh_series(k: int) -> np.ndarray:
    # ((1+u)/2)^k (u-1)/2 as a Chebyshev series in u = cosh t
    p = P.polymul(P.polypow([0.5, 0.5], k), [-0.5, 0.5])
    return C.poly2cheb(p)


def _trig_primitive(cheb: np.ndarray, t):
    out = cheb[0] * t
    for j in range(1, len(cheb)):
        out = out + cheb[j] * np.sin(j * t) / j
    return out


def _hyp_primitive(cheb: np.ndarray, t):
    out = cheb[0] * t
    for j in range(1, len(cheb)):
        out = out + cheb[j] * np.sinh(j * t) / j
    return out


def density_primitive(h, x):
    """``int_0^x sqrt((1-s)/s) h(s) ds`` for ``0 <= x <= 1``, in closed form."""
    x = np.asarray(x, dtype=float)
    t = np.arccos(np.clip(1.0 - 2.0 * x, -1.0, 1.0))
    out = np.zeros_like(t)
    for k, c in enumerate(h):
        out = out + c * _trig_primitive(_cos_series(k), t)
    return out if out.ndim else float(out)


def density_tail(h, x):
    """``int_x^1 sqrt((1-s)/s) h(s) ds`` for ``0 <= x <= 1``.

    Written as a primitive evaluated from the soft edge so that the result
    keeps full relative accuracy as ``x -> 1``.
    """
    x = np.asarray(x, dtype=float)
    r = np.arccos(np.clip(2.0 * x - 1.0, -1.0, 1.0))  # r = pi - t
    out = np.zeros_like(r)
    for k, c in enumerate(h):
        # substitute t = pi - r: cos(j t) = (-1)^j cos(j r)
        ser = _cos_series(k) * (-1.0) ** np.arange(len(_cos_series(k)))
        out = out + c * _trig_primitive(ser, r)
    return out if out.ndim else float(out)


def exterior_integral(h, x):
    """``int_1^x sqrt((s-1)/s) h(s) ds`` for ``x >= 1``, in closed form."""
    x = np.asarray(x, dtype=float)
    t = np.arccosh(np.maximum(2.0 * x - 1.0, 1.0))
    out = np.zeros_like(t)
    for k, c in enumerate(h):
        out = out + c * _hyp_primitive(_cosh_series(k), t)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class EquilibriumData:
    """Equilibrium data at a given ``n``.

    Attributes
    ----------
    n : float
    beta_n : float
        MRS number.
    h_coeffs : ndarray
        Coefficients of ``h_n`` in ascending degree.
    c_n, tilde_c_n : float
        Soft- and hard-edge constants ``(h_n(1)/2)**(2/3)`` and ``(h_n(0)/2)**2``.
    """

    n: float
    beta_n: float
    h_coeffs: np.ndarray
    alpha: float = 0.0
    c_n: float = field(init=False)
    tilde_c_n: float = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.h_coeffs, dtype=float)
        object.__setattr__(self, "h_coeffs", h)
        object.__setattr__(self, "c_n", (P.polyval(1.0, h) / 2.0) ** (2.0 / 3.0))
        object.__setattr__(self, "tilde_c_n", (h[0] / 2.0) ** 2)

    @property
    def m(self) -> int:
        return len(self.h_coeffs)

    def h(self, x):
        return P.polyval(x, self.h_coeffs)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n, "beta_n": self.beta_n, "alpha": self.alpha,
            "h_coeffs": self.h_coeffs.tolist(),
            "c_n": self.c_n, "tilde_c_n": self.tilde_c_n,
        })


def equilibrium(w: Weight, n: float) -> EquilibriumData:
    """Compute ``beta_n`` and ``h_n`` and wrap them."""
    beta = mrs_number(w, n)
    return EquilibriumData(n, beta, h_polynomial(w, n, beta), alpha=w.alpha)


def omega_n(eq: EquilibriumData, x):
    """Equilibrium density on ``(0, 1]``."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa > 1)):
        raise ValueError("omega_n is defined on (0, 1]")
    out = np.sqrt((1 - xa) / xa) * eq.h(xa) / (2 * math.pi)
    return out if out.ndim else float(out)


def edge_constants(eq: EquilibriumData) -> tuple:
    return eq.c_n, eq.tilde_c_n


def _eta(alpha, shift, x):
    return 0.5 * (alpha + shift) * np.arccos(2.0 * x - 1.0)


def _check_open(x):
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa >= 1)):
        raise ValueError("phase functions are defined on (0, 1)")
    return xa


def phase_F(eq: EquilibriumData, j: int, x):
    """``F_{n,j}(x) = (n/2) int_x^1 sqrt((1-s)/s) h_n + eta_j(x) - pi/4``.

    ``eta_1, eta_2 = (alpha +- 1)/2 * arccos(2x - 1)``.
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    xa = _check_open(x)
    shift = 1.0 if j == 1 else -1.0
    out = 0.5 * eq.n * density_tail(eq.h_coeffs, xa) + _eta(eq.alpha, shift, xa) - math.pi / 4
    return out if np.ndim(out) else float(out)


def phase_G(eq: EquilibriumData, x):
    """Mean of the two phases: ``eta_j`` replaced by ``(alpha/2) arccos(2x-1)``."""
    xa = _check_open(x)
    out = 0.5 * eq.n * density_tail(eq.h_coeffs, xa) + _eta(eq.alpha, 0.0, xa) - math.pi / 4
    return out if np.ndim(out) else float(out)


def phase_F_prime(eq: EquilibriumData, j: int, x):
    xa = _check_open(x)
    shift = 1.0 if j == 1 else -1.0
    return (-0.5 * eq.n * np.sqrt((1 - xa) / xa) * eq.h(xa)
            - (eq.alpha + shift) / (2 * np.sqrt(xa * (1 - xa))))


def theta(mdeg: int, x):
    """``theta(x) = (1/2) int_0^x sqrt((1-s)/s) h(s) ds`` with the limiting ``h``."""
    return 0.5 * density_primitive(h_limit(mdeg), x)


def theta_prime(mdeg: int, x):
    x = np.asarray(x, dtype=float)
    return 0.5 * np.sqrt((1 - x) / x) * P.polyval(x, h_limit(mdeg))


def check_theta_ode(mdeg: int, grid) -> float:
    """Max residual of ``theta - x theta'/m - pi + arccos(2x - 1)`` on ``grid``."""
    x = np.asarray(grid, dtype=float)
    r = theta(mdeg, x) - x * theta_prime(mdeg, x) / mdeg - math.pi + np.arccos(2 * x - 1)
    return float(np.max(np.abs(r)))
