"""The fixed matrices ``X``, ``Y`` and ``T_m = I - XY`` and their bounds.

Everything here depends on ``m`` only.  ``X`` is built from the oscillatory
integrals ``I(q)`` and ``Ihat(q)`` against ``1/h``, ``Y`` from the binomial
numbers ``c_l``.  The checks return (value, bound, slack) triples instead of
bare booleans so regressions stay visible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from .equilibrium import central_binomial_ratio, h_limit
from .quadrature import gauss_legendre

BOUND_D = 2.22
BOUND_C = 2.18
W_MAX = 2.44
WHAT_MAX = 2.36


def c_coefficients(m: int) -> np.ndarray:
    """``c_0 .. c_{2m-2}`` with ``c_l = 2^(2-2m) binom(2m-2, m-1-l) / A_m``."""
    am = central_binomial_ratio(m)
    out = np.zeros(2 * m - 1)
    for ell in range(2 * m - 1):
        k = m - 1 - ell
        if 0 <= k <= 2 * m - 2:
            out[ell] = math.comb(2 * m - 2, k) * 2.0 ** (2 - 2 * m) / am
    return out


def _inv_h_theta(m: int, theta):
    return 1.0 / P.polyval(np.cos(theta) ** 2, h_limit(m))


def _V(q, theta):
    # sin((2q-1) t) / sin t, regular at 0
    s = np.sin(theta)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.sin((2 * q - 1) * theta) / s
    return np.where(np.abs(s) < 1e-12, 2 * q - 1.0, v)


def _Vhat(q, theta):
    return 0.5 * (_V(q + 1, theta) + _V(q, theta))


def integral_I(m: int, q: int) -> float:
    """``I(q) = (4/pi) int_0^(pi/2) V_q(t) / h(cos^2 t) dt`` by adaptive quadrature."""
    f = lambda t: float(_V(q, t) / P.polyval(math.cos(t) ** 2, h_limit(m)))
    val, err = integrate.quad(f, 0.0, math.pi / 2, limit=max(200, 8 * q), epsabs=1e-14, epsrel=1e-13)
    return 4.0 / math.pi * val


def integral_Ihat(m: int, q: int) -> float:
    """``Ihat(q) = (4/pi) int_0^(pi/2) Vhat_q(t) / h(cos^2 t) dt``."""
    f = lambda t: float(_Vhat(q, t) / P.polyval(math.cos(t) ** 2, h_limit(m)))
    val, err = integrate.quad(f, 0.0, math.pi / 2, limit=max(200, 8 * q), epsabs=1e-14, epsrel=1e-13)
    return 4.0 / math.pi * val


def integrals_sweep(m: int, qmax: int, nodes: int | None = None):
    """``I(q)`` and ``Ihat(q)`` for ``q = 1..qmax`` with one Gauss-Legendre rule.

    The integrands are trigonometric polynomials of degree ``<= 2 qmax`` times
    the smooth function ``1/h(cos^2 t)``, so a fixed rule suffices.
    """
    p = nodes or (2 * qmax + 4 * m + 80)
    y, wy = gauss_legendre(p)
    t = 0.25 * math.pi * (1.0 + y)
    w = 0.25 * math.pi * wy * _inv_h_theta(m, t)
    q = np.arange(1, qmax + 2)[:, None]
    V = _V(q, t[None, :])
    I = 4.0 / math.pi * (V * w).sum(axis=1)
    Ihat = 0.5 * (I[1:] + I[:-1])
    return I[:-1], Ihat


@dataclass
class TmSystem:
    m: int
    A_m: float
    c: np.ndarray          # c_1 .. c_{m-1}
    d: np.ndarray          # d_0 .. d_{m-1}
    gamma_c: float
    X: np.ndarray
    Y: np.ndarray
    T_m: np.ndarray
    R: np.ndarray
    Qhat: np.ndarray
    Q: np.ndarray
    v: np.ndarray
    v0: np.ndarray
    v1: np.ndarray
    I_vals: np.ndarray = field(repr=False)
    Ihat_vals: np.ndarray = field(repr=False)


@lru_cache(maxsize=128)
def build_tm(m: int, method: str = "sweep") -> TmSystem:
    """Assemble ``X``, ``Y``, ``T_m`` and the auxiliary objects for ``m >= 1``.

    ``method="quad"`` evaluates every ``I``, ``Ihat`` by adaptive quadrature;
    the default ``"sweep"`` uses the single fixed rule of :func:`integrals_sweep`
    (the two agree to ~1e-13 and the sweep is much faster for large ``m``).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    call = c_coefficients(m)
    c = call[1:m]
    d = np.array([call[k + 1:m].sum() for k in range(m)])
    am = central_binomial_ratio(m)
    k = m - 1
    if k:
        if method == "quad":
            Iv = np.array([integral_I(m, q) for q in range(1, m)])
            Ihv = np.array([integral_Ihat(m, q) for q in range(1, 2 * m - 2)])
        else:
            Iv, Ihv = integrals_sweep(m, 2 * m - 3)
            Iv = Iv[: m - 1]
        ii, jj = np.meshgrid(np.arange(1, m), np.arange(1, m), indexing="ij")
        R = Ihv[ii + jj - 2]
        Q = call[ii + jj - 1]
    else:
        Iv = np.zeros(0)
        Ihv = np.zeros(0)
        R = np.zeros((0, 0))
        Q = np.zeros((0, 0))
    s = math.sqrt(m / (2 * m - 1))
    v = s * Iv - 1.0 / (2 * math.sqrt(m))
    X = np.zeros((m, m))
    X[:k, :k] = R
    X[:k, k] = v
    X[k, :k] = v
    X[k, k] = 1.0 - 1.0 / math.sqrt(2 * m - 1)
    Y = np.zeros((m, m))
    Y[:k, :k] = Q
    Y[k, k] = 0.5
    gamma_c = 1.0 - c[0] / 4.0 if k else 1.0
    if k:
        U0 = np.eye(k)
        U0[0, :] -= 0.25 * Q[0, :]
        Qhat = Q @ np.linalg.inv(U0)
        v0 = np.full(k, -1.0 / (2 * math.sqrt(m)))
        v0[0] += 0.5 * s
        v1 = s * Iv.copy()
        v1[0] -= 0.5 * s
    else:
        Qhat = np.zeros((0, 0))
        v0 = v1 = np.zeros(0)
    return TmSystem(m=m, A_m=am, c=c, d=d, gamma_c=gamma_c, X=X, Y=Y,
                    T_m=np.eye(m) - X @ Y, R=R, Qhat=Qhat, Q=Q, v=v, v0=v0, v1=v1,
                    I_vals=Iv, Ihat_vals=Ihv)


@dataclass(frozen=True)
class Bound:
    name: str
    value: float
    bound: float
    strict: bool = False

    @property
    def slack(self) -> float:
        return self.bound - self.value

    @property
    def ok(self) -> bool:
        return self.value < self.bound if self.strict else self.value <= self.bound

    def __str__(self):
        rel = "<" if self.strict else "<="
        flag = "ok" if self.ok else "FAIL"
        return f"{self.name}: {self.value:.6g} {rel} {self.bound:.6g} (slack {self.slack:.3g}) {flag}"


def verify_integral_bounds(m: int, qmax: int = 200) -> list[Bound]:
    """``|I(q) - delta/2| <= D/(2m)`` and ``|Ihat(q) - delta/4| <= C/(2m)`` for ``q <= qmax``."""
    I, Ih = integrals_sweep(m, qmax)
    I = I.copy()
    Ih = Ih.copy()
    I[0] -= 0.5
    Ih[0] -= 0.25
    return [Bound(f"max|I(q)-d/2| m={m}", float(np.abs(I).max()), BOUND_D / (2 * m)),
            Bound(f"max|Ihat(q)-d/4| m={m}", float(np.abs(Ih).max()), BOUND_C / (2 * m))]


def qhat_norm_identity(m: int) -> tuple[float, float]:
    """``(||Qhat||_{inf->1}, d_0^2/(4 gamma) + m c_1 / 2)``."""
    s = build_tm(m)
    return float(np.abs(s.Qhat).sum()), s.d[0] ** 2 / (4 * s.gamma_c) + 0.5 * m * s.c[0]


def verify_qhat_bounds(m: int) -> list[Bound]:
    """The three bounds on ``Qhat`` and ``v`` plus the exact norm identity."""
    if m < 2:
        raise ValueError("m must be >= 2")
    s = build_tm(m)
    vq = s.v @ s.Qhat
    lhs, rhs = qhat_norm_identity(m)
    ratios = s.d[1:m] / s.c
    return [
        Bound("||Qhat||_inf->1", lhs, m * (math.pi / 12 + 0.5)),
        Bound("||v Qhat||_1", float(np.abs(vq).sum()), 0.3918 * math.sqrt(m)),
        Bound("v Qhat v^t", float(vq @ s.v), 1.0 / math.sqrt(2 * m - 1), strict=True),
        Bound("norm identity defect", abs(lhs - rhs) / rhs, 1e-12),
        Bound("max d_j/c_j - d_1/c_1", float(ratios.max() - ratios[0]), 0.0),
        Bound("-min d_j/c_j", float(-ratios.min()), 0.0),
    ]


def verify_tm_invertible(m: int) -> tuple[float, float]:
    """``(det T_m, cond T_m)``."""
    s = build_tm(m)
    return float(np.linalg.det(s.T_m)), float(np.linalg.cond(s.T_m))


def W(q: int, theta):
    """``W_q(t) = (4/pi)(t + sum_{k<q} sin(2kt)/k)``."""
    t = np.asarray(theta, dtype=float)
    k = np.arange(1, q)
    return 4.0 / math.pi * (t + (np.sin(2 * np.multiply.outer(t, k)) / k).sum(axis=-1))


def W_hat(q: int, theta):
    return 0.5 * (W(q + 1, theta) + W(q, theta))


def u_function(m: int, x):
    """``u(x) = 1/h(x^2) - (1 - x^2)/2 + 1/(4m)``."""
    x = np.asarray(x, dtype=float)
    return 1.0 / P.polyval(x * x, h_limit(m)) - 0.5 * (1 - x * x) + 0.25 / m


def aux_functions(m: int, qmax: int = 50, points: int = 4001) -> list[Bound]:
    """Shape checks on ``u``, ``W_q`` and ``W_hat_q``."""
    x = np.linspace(0.0, 1.0, points)
    u = u_function(m, x)
    th = np.linspace(0.0, math.pi / 2, points)
    wmax = wmin = whmax = whmin = 0.0
    for q in range(1, qmax + 1):
        wq = W(q, th)
        wh = W_hat(q, th)
        wmax, wmin = max(wmax, wq.max()), min(wmin, wq.min())
        whmax, whmin = max(whmax, wh.max()), min(whmin, wh.min())
    return [
        Bound("|u(0)|", abs(float(u[0])), 1e-12),
        Bound("|u(1) - 1/(2m)|", abs(float(u[-1]) - 0.5 / m), 1e-12),
        Bound("-min u", float(-u.min()), 0.25 / m, strict=True),
        Bound("max W_q", float(wmax), W_MAX),
        Bound("-min W_q", float(-wmin), 1e-12),
        Bound("max What_q", float(whmax), WHAT_MAX),
        Bound("-min What_q", float(-whmin), 1e-12),
    ]


def aYa_identity(m: int) -> float:
    """``a Y a^t`` with ``a = (1, .., 1, sqrt(m/(2m-1)))``; equals ``m/2``."""
    s = build_tm(m)
    a = np.ones(m)
    a[-1] = math.sqrt(m / (2 * m - 1))
    return float(a @ s.Y @ a)


def hypergeometric_h(m: int, x):
    """``4m/(2m-1) 2F1(1, 1-m; 3/2-m; x)`` summed as a terminating series."""
    x = np.asarray(x, dtype=float)
    a, b, c = 1.0, 1.0 - m, 1.5 - m
    term = np.ones_like(x)
    s = term.copy()
    for k in range(m - 1):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        s = s + term
    return 4.0 * m / (2 * m - 1) * s
