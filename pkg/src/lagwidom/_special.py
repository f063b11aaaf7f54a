"""Bessel ``J_nu`` and Airy ``Ai`` for real arguments, vectorized over ``x``.

Each function is pieced together from three representations:

* a power series near the origin,
* a table of nodes spaced 0.25 apart, filled by high-order Taylor stepping
  of the defining ODE, from which any point is reached by one short Taylor
  expansion,
* the classical large-argument asymptotic expansions.

For ``Ai`` the table on ``x > 0`` is filled by stepping *down* from the
asymptotic region, the stable direction for the recessive solution.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .quadrature import gauss_legendre

SPACING = 0.25
TAYLOR_TERMS = 28
BESSEL_SERIES_MAX = 8.0
AIRY_ASYMPT = 8.0


# ---------------------------------------------------------------- Bessel

def _bessel_series(nu, x):
    x = np.asarray(x, dtype=float)
    half = 0.5 * x
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.where(x > 0, np.exp(nu * np.log(np.where(x > 0, half, 1.0)) - math.lgamma(nu + 1)),
                        1.0 if nu == 0 else 0.0)
    term = lead.copy()
    J = term.copy()
    dsum = nu * term            # sum of (2k + nu) * term_k, J' = dsum / x
    q = half * half
    for k in range(1, 80):
        term = -term * q / (k * (k + nu))
        J += term
        dsum += (2 * k + nu) * term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(J), 1e-300)):
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        dJ = np.where(x > 0, dsum / np.where(x > 0, x, 1.0), _dj_at_zero(nu))
    return J, dJ


def _dj_at_zero(nu):
    if nu == 1.0:
        return 0.5
    if nu > 1.0 or nu == 0.0:
        return 0.0
    return np.inf


def _hankel(nu, x, terms=40):
    """``J_nu`` from the Hankel expansion (``x`` large)."""
    mu = 4.0 * nu * nu
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    a = np.ones_like(x)
    alive = np.ones(x.shape, dtype=bool)
    last = np.full(x.shape, np.inf)
    for k in range(1, terms):
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(a)
        alive &= mag < last
        last = np.where(alive, mag, last)
        t = np.where(alive, a, 0.0)
        if k % 2 == 1:
            Q += (-1) ** ((k - 1) // 2) * t
        else:
            P += (-1) ** (k // 2) * t
        if not alive.any():
            break
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def _hankel_start(nu: float) -> float:
    return max(25.0, nu * nu + 10.0)


def _bessel_taylor_coeffs(nu, x0, y0, dy0, terms=TAYLOR_TERMS):
    # x^2 y'' + x y' + (x^2 - nu^2) y = 0 expanded about x0
    x0 = np.asarray(x0, dtype=float)
    c = [np.asarray(y0, dtype=float), np.asarray(dy0, dtype=float)]
    zero = np.zeros_like(x0)
    for k in range(0, terms - 2):
        cm1 = c[k - 1] if k >= 1 else zero
        cm2 = c[k - 2] if k >= 2 else zero
        num = ((k + 1) * x0 * (2 * k + 1) * c[k + 1]
               + (k * k + x0 * x0 - nu * nu) * c[k] + 2 * x0 * cm1 + cm2)
        c.append(-num / (x0 * x0 * (k + 2) * (k + 1)))
    return c


def _taylor_eval(c, t):
    y = np.zeros(np.broadcast(c[0], t).shape)
    dy = np.zeros_like(y)
    for k in range(len(c) - 1, 0, -1):
        y = y * t + c[k]
        dy = dy * t + k * c[k]
    y = y * t + c[0]
    return y, dy


@lru_cache(maxsize=64)
def _bessel_table(nu: float):
    x_end = _hankel_start(nu)
    nodes = np.arange(BESSEL_SERIES_MAX, x_end + SPACING, SPACING)
    J = np.empty_like(nodes)
    dJ = np.empty_like(nodes)
    j0, d0 = _bessel_series(nu, np.array([nodes[0]]))
    J[0], dJ[0] = j0[0], d0[0]
    for i in range(1, len(nodes)):
        c = _bessel_taylor_coeffs(nu, nodes[i - 1], J[i - 1], dJ[i - 1], 36)
        J[i], dJ[i] = (float(v) for v in _taylor_eval(c, SPACING))
    return nodes, J, dJ


def bessel_j(nu: float, x):
    """Return ``(J_nu(x), J_nu'(x))`` for ``nu >= 0`` and ``x >= 0``."""
    nu = float(nu)
    if nu < 0:
        raise ValueError("order must be non-negative")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("argument must be non-negative")
    flat = xa.ravel()
    J = np.empty_like(flat)
    dJ = np.empty_like(flat)
    small = flat <= BESSEL_SERIES_MAX
    big = flat >= _hankel_start(nu)
    mid = ~small & ~big
    if small.any():
        J[small], dJ[small] = _bessel_series(nu, flat[small])
    if mid.any():
        nodes, tJ, tdJ = _bessel_table(nu)
        i = np.clip(np.rint((flat[mid] - nodes[0]) / SPACING).astype(int), 0, len(nodes) - 1)
        c = _bessel_taylor_coeffs(nu, nodes[i], tJ[i], tdJ[i])
        J[mid], dJ[mid] = _taylor_eval(c, flat[mid] - nodes[i])
    if big.any():
        xb = flat[big]
        J[big] = _hankel(nu, xb)
        dJ[big] = nu / xb * J[big] - _hankel(nu + 1.0, xb)
    J = J.reshape(xa.shape)
    dJ = dJ.reshape(xa.shape)
    if J.ndim == 0:
        return float(J), float(dJ)
    return J, dJ


def bessel_alpha_integral(alpha: float, u):
    """``L(u) = int_0^u (alpha / s) J_alpha(s) ds`` (zero when ``alpha = 0``)."""
    u = np.asarray(u, dtype=float)
    if alpha == 0.0:
        return np.zeros_like(u)
    out = np.empty(u.shape)
    flat = u.ravel()
    res = np.empty_like(flat)
    lo = np.minimum(flat, BESSEL_SERIES_MAX)
    # termwise integration of the power series
    half = 0.5 * lo
    with np.errstate(divide="ignore"):
        lead = np.where(lo > 0, np.exp(alpha * np.log(np.where(lo > 0, half, 1.0)) - math.lgamma(alpha + 1)), 0.0)
    term = lead
    s = term / alpha
    q = half * half
    for k in range(1, 80):
        term = -term * q / (k * (k + alpha))
        s += term / (2 * k + alpha)
        if np.all(np.abs(term) < 1e-18):
            break
    res[:] = alpha * s
    far = flat > BESSEL_SERIES_MAX
    if far.any():
        res[far] += _gl_integral(lambda s_: alpha * bessel_j(alpha, s_)[0] / s_,
                                 np.full(far.sum(), BESSEL_SERIES_MAX), flat[far])
    out[...] = res.reshape(u.shape)
    return out if out.ndim else float(out)


def _gl_integral(f, a, b, width=1.0, order=20):
    """Composite Gauss-Legendre on many intervals ``[a_i, b_i]`` at once."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    P = max(1, int(math.ceil(np.max(np.abs(b - a)) / width))) if a.size else 1
    y, wy = gauss_legendre(order)
    h = (b - a) / P
    j = np.arange(P)
    left = a[:, None] + h[:, None] * j[None, :]
    x = left[:, :, None] + 0.5 * h[:, None, None] * (1.0 + y)[None, None, :]
    vals = f(x.reshape(-1)).reshape(x.shape)
    return 0.5 * h * (vals * wy).sum(axis=(1, 2))


# ---------------------------------------------------------------- Airy

AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)


def _airy_u(K):
    u = [1.0]
    for k in range(1, K):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1)))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, K)]
    return u, v


_U, _V = _airy_u(40)


def _asum(coef, z, parity=None, terms=40):
    """Alternating sum ``sum (-1)^k coef_k z^-k`` truncated at its smallest term."""
    s = np.zeros_like(z)
    last = np.full(z.shape, np.inf)
    alive = np.ones(z.shape, dtype=bool)
    inv = 1.0 / z
    zk = np.ones_like(z)
    idx = range(terms) if parity is None else range(parity, terms, 2)
    powk = 0
    for k in idx:
        while powk < k:
            zk = zk * inv
            powk += 1
        t = coef[k] * zk
        mag = np.abs(t)
        alive &= mag < last
        last = np.where(alive, mag, last)
        sign = (-1) ** (k if parity is None else (k - parity) // 2)
        s += np.where(alive, sign * t, 0.0)
    return s


def _airy_asym_pos(x):
    zeta = 2.0 / 3.0 * x ** 1.5
    e = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    r = x ** 0.25
    return e / r * _asum(_U, zeta), -r * e * _asum(_V, zeta)


def _airy_asym_neg(x):
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    r = z ** 0.25
    c = np.cos(zeta - math.pi / 4)
    s = np.sin(zeta - math.pi / 4)
    ai = (c * _asum(_U, zeta, 0) + s * _asum(_U, zeta, 1)) / (math.sqrt(math.pi) * r)
    aip = r * (s * _asum(_V, zeta, 0) - c * _asum(_V, zeta, 1)) / math.sqrt(math.pi)
    return ai, aip


def _airy_taylor_coeffs(x0, y0, dy0, terms=TAYLOR_TERMS):
    # y'' = x y  about x0:  (k+2)(k+1) c_{k+2} = x0 c_k + c_{k-1}
    c = [np.asarray(y0, dtype=float), np.asarray(dy0, dtype=float)]
    zero = np.zeros_like(c[0])
    for k in range(terms - 2):
        cm1 = c[k - 1] if k >= 1 else zero
        c.append((x0 * c[k] + cm1) / ((k + 2) * (k + 1)))
    return c


@lru_cache(maxsize=1)
def _airy_table():
    top = AIRY_ASYMPT + 2.0
    pos = np.arange(top, -SPACING / 2, -SPACING)
    a, d = _airy_asym_pos(np.array([top]))
    Ap, dAp = [a[0]], [d[0]]
    for i in range(1, len(pos)):
        c = _airy_taylor_coeffs(pos[i - 1], Ap[-1], dAp[-1], 40)
        y, dy = _taylor_eval(c, -SPACING)
        Ap.append(float(y))
        dAp.append(float(dy))
    neg = np.arange(0.0, -AIRY_ASYMPT - SPACING / 2, -SPACING)
    An, dAn = [AI0], [AIP0]
    for i in range(1, len(neg)):
        c = _airy_taylor_coeffs(neg[i - 1], An[-1], dAn[-1], 40)
        y, dy = _taylor_eval(c, -SPACING)
        An.append(float(y))
        dAn.append(float(dy))
    # positive half: keep the stepped values except at 0, where the exact constants win
    nodes = np.concatenate([neg[::-1], pos[::-1][1:]])
    A = np.concatenate([An[::-1], Ap[::-1][1:]])
    dA = np.concatenate([dAn[::-1], dAp[::-1][1:]])
    return nodes, A, dA, (Ap[-1], dAp[-1])


def airy_ai(x):
    """Return ``(Ai(x), Ai'(x))`` for real ``x``."""
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    A = np.empty_like(flat)
    dA = np.empty_like(flat)
    pos = flat >= AIRY_ASYMPT
    neg = flat <= -AIRY_ASYMPT
    mid = ~pos & ~neg
    if pos.any():
        A[pos], dA[pos] = _airy_asym_pos(flat[pos])
    if neg.any():
        A[neg], dA[neg] = _airy_asym_neg(flat[neg])
    if mid.any():
        nodes, tA, tdA, _ = _airy_table()
        i = np.clip(np.rint((flat[mid] - nodes[0]) / SPACING).astype(int), 0, len(nodes) - 1)
        c = _airy_taylor_coeffs(nodes[i], tA[i], tdA[i])
        A[mid], dA[mid] = _taylor_eval(c, flat[mid] - nodes[i])
    A = A.reshape(xa.shape)
    dA = dA.reshape(xa.shape)
    if A.ndim == 0:
        return float(A), float(dA)
    return A, dA


def airy_integral(a, b):
    """``int_a^b Ai(s) ds`` for arrays ``a, b`` (finite limits)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = np.broadcast(a, b).shape
    a, b = (np.broadcast_to(v, shape).ravel() for v in (a, b))
    # beyond this point the positive tail is below 1e-30
    cap = 25.0
    a_c = np.minimum(a, cap)
    b_c = np.minimum(b, cap)
    out = _gl_integral(lambda s: airy_ai(s)[0], a_c, b_c, width=0.5, order=16) if a.size else np.zeros(0)
    out = out.reshape(shape)
    return out if out.ndim else float(out)


AIRY_TOTAL_RIGHT = 1.0 / 3.0
AIRY_TOTAL_LEFT = 2.0 / 3.0


def airy_tail_right(x):
    """``int_x^inf Ai``."""
    return AIRY_TOTAL_RIGHT - airy_integral(0.0, x)


def airy_tail_left(x):
    """``int_-inf^x Ai``."""
    return AIRY_TOTAL_LEFT + airy_integral(0.0, x)
